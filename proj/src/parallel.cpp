#include "chirplock/parallel.hpp"

#include <cstdlib>
#include <string>

namespace chirplock {

int default_workers() {
    if (const char* env = std::getenv("CHIRPLOCK_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace chirplock
