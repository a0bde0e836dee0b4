#pragma once

#include <stdexcept>
#include <string>

// Always-on invariant check. These guard exact counting identities, so they
// stay active in release builds; cost is negligible next to the line walks.
#define PGCAP_CHECK(cond, what)                                               \
    do {                                                                      \
        if (!(cond))                                                          \
            throw std::logic_error(std::string("invariant violated: ") +     \
                                   (what) + " (" __FILE__ ":" +               \
                                   std::to_string(__LINE__) + ")");           \
    } while (0)
