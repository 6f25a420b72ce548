#include "za/version.hpp"

namespace za {
const char* version() { return "0.1.0"; }
}
