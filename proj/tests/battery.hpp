#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

// Shared regression battery: the worked examples plus synthetic
// power-law problems, as config documents.

namespace stricttest_tests {

inline std::string eaa1_config(double alpha) {
    std::ostringstream os;
    os << "param alpha = " << alpha << "\n"
       << "interval = (-inf, inf)\n"
       << "x0 = 0\n"
       << "mu = abs(x)^alpha\n"
       << "sigma = 1\n"
       << "b = x\n"
       << "asym left  mu C=1 p=alpha\n"
       << "asym right mu C=1 p=alpha\n"
       << "asym left  b C=-1 p=1\n"
       << "asym right b C=1 p=1\n";
    return os.str();
}

inline std::string cev_config(double alpha, double beta, double mu0 = 1.0, double sigma0 = 1.0) {
    std::ostringstream os;
    os << "param mu0 = " << mu0 << "\nparam sigma0 = " << sigma0 << "\nparam alpha = " << alpha
       << "\nparam beta = " << beta << "\n"
       << "interval = (0, inf)\n"
       << "x0 = 1\n"
       << "mu = mu0*x^alpha\n"
       << "sigma = sigma0*x^beta\n"
       << "b = -(mu0/sigma0)*x^(alpha-beta)\n"
       << "asym left  mu C=mu0 p=alpha\n"
       << "asym right mu C=mu0 p=alpha\n"
       << "asym left  sigma C=sigma0 p=beta\n"
       << "asym right sigma C=sigma0 p=beta\n"
       << "asym left  b C=-(mu0/sigma0) p=alpha-beta\n"
       << "asym right b C=-(mu0/sigma0) p=alpha-beta\n";
    return os.str();
}

// Local-volatility price model sigma(x) = sigma0 x^alpha with rate mu0:
// the discounted price is the exponential with b = sigma(x)/x.
inline std::string bcev_config(double alpha, double mu0, double sigma0 = 1.0) {
    std::ostringstream os;
    os << "param mu0 = " << mu0 << "\nparam sigma0 = " << sigma0 << "\nparam alpha = " << alpha
       << "\n"
       << "interval = (0, inf)\n"
       << "x0 = 1\n"
       << "mu = mu0*x\n"
       << "sigma = sigma0*x^alpha\n"
       << "b = sigma0*x^(alpha-1)\n";
    if (mu0 != 0.0)
        os << "asym left  mu C=mu0 p=1\nasym right mu C=mu0 p=1\n";
    else
        os << "asym left  mu C=0\nasym right mu C=0\n";
    os << "asym left  sigma C=sigma0 p=alpha\n"
       << "asym right sigma C=sigma0 p=alpha\n"
       << "asym left  b C=sigma0 p=alpha-1\n"
       << "asym right b C=sigma0 p=alpha-1\n";
    return os.str();
}

inline std::string bm_config() {
    return "interval = (-inf, inf)\nx0 = 0\nmu = 0\nsigma = 1\nb = 0\n";
}

struct BatteryEntry {
    std::string name;
    std::string config;
};

// At least 20 specs: the worked examples and synthetic power laws.
inline std::vector<BatteryEntry> scale_battery() {
    std::vector<BatteryEntry> out;
    for (double a : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 3.5, 4.0})
        out.push_back({"eaa1 alpha=" + std::to_string(a), eaa1_config(a)});
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {0.0, 0.0}, {0.0, 0.5}, {1.0, 1.0}, {2.0, 0.5}, {-1.0, 0.5}, {1.0, -0.5},
             {0.5, 1.5}, {2.0, 2.0}})
        out.push_back({"cev a=" + std::to_string(a) + " b=" + std::to_string(b),
                       cev_config(a, b)});
    for (double a : {0.5, 1.0, 2.0})
        out.push_back({"lv-price alpha=" + std::to_string(a) + " rate=0.05",
                       bcev_config(a, 0.05)});
    for (double a : {0.5, 2.0})
        out.push_back({"lv-price alpha=" + std::to_string(a) + " rate=0", bcev_config(a, 0.0)});
    out.push_back({"brownian", bm_config()});
    return out;
}

}  // namespace stricttest_tests
