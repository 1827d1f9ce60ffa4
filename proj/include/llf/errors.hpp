#pragma once

#include <stdexcept>
#include <string>

namespace llf {

// Bad arguments or contract violations caught before any work is done.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable, unwritable or malformed files and datasets.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite losses, diverged optimizations, failed pretraining.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace llf
