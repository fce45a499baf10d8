#include "perieig/error.hpp"

namespace perieig {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::validation: return "validation";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::positivity: return "positivity";
        case ErrorKind::step_size: return "step-size";
        case ErrorKind::regime: return "regime";
        case ErrorKind::bracket: return "bracket";
        case ErrorKind::range: return "range";
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace perieig
