#pragma once

#include <string>

namespace stricttest {

// Three-valued logic for verdicts that may rest on inconclusive integrals.
enum class TriState { Yes, No, Unknown };

// Kleene conjunction/disjunction: a conclusive short-circuit beats an
// unknown operand (one true disjunct suffices, one false conjunct kills).
inline TriState tri_and(TriState a, TriState b) {
    if (a == TriState::No || b == TriState::No) return TriState::No;
    if (a == TriState::Yes && b == TriState::Yes) return TriState::Yes;
    return TriState::Unknown;
}

inline TriState tri_or(TriState a, TriState b) {
    if (a == TriState::Yes || b == TriState::Yes) return TriState::Yes;
    if (a == TriState::No && b == TriState::No) return TriState::No;
    return TriState::Unknown;
}

inline TriState tri_not(TriState a) {
    switch (a) {
        case TriState::Yes: return TriState::No;
        case TriState::No: return TriState::Yes;
        default: return TriState::Unknown;
    }
}

inline TriState tri_of(bool b) { return b ? TriState::Yes : TriState::No; }

inline const char* to_string(TriState t) {
    switch (t) {
        case TriState::Yes: return "yes";
        case TriState::No: return "no";
        default: return "unknown";
    }
}

}  // namespace stricttest
