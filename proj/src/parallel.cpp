#include "vcons/parallel.hpp"

#include <cstdlib>
#include <string>

namespace vcons
{

unsigned default_jobs()
{
    if(const char* env = std::getenv("VCONS_JOBS")) {
        try {
            const int jobs = std::stoi(env);
            if(jobs > 0) {
                return static_cast<unsigned>(jobs);
            }
        }
        catch(const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace vcons
