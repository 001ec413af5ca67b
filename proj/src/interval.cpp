#include "cfrbc/interval.hpp"

#include <sstream>

namespace cfrbc {

void OrderParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("order parameters must lie in [0,1]");
    }
    if (alpha == beta) {
        throw std::invalid_argument("order parameters alpha and beta must differ");
    }
}

std::string to_string(const Interval& x) {
    std::ostringstream os;
    os.precision(17);
    os << '[' << x.lower() << ", " << x.upper() << ']';
    return os.str();
}

}  // namespace cfrbc
