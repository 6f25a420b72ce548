#pragma once

namespace za {
const char* version();
}
