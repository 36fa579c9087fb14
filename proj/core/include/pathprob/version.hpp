#pragma once

namespace pathprob {
inline constexpr const char* version = "0.1.0";
}
