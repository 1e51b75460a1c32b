#pragma once

#include <stdexcept>
#include <string>

namespace flashkit {

// I/O failure (open/read/write), message carries the path.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File exists but is not a valid container (bad magic, bad header).
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Header promised more payload than the file holds.
struct truncation_error : format_error {
    using format_error::format_error;
};

// Model training cannot proceed (single-class input, degenerate feature).
struct train_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Least-squares fit failed (rank-deficient design).
struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace flashkit
