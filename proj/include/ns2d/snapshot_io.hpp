#pragma once

#include "ns2d/field.hpp"

#include <stdexcept>
#include <string>

namespace ns2d {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary little-endian layout:
//   "NS2DFLD\0", u32 version, u32 M, f64 L,
//   then (re, im) f64 pairs over n1 = -M/2..M/2-1 (slow), n2 likewise (fast),
//   first component 1, then component 2.
void write_snapshot(const std::string& path, const SpectralField& u);
SpectralField read_snapshot(const std::string& path, double dealias_fraction = 2.0 / 3.0);

}  // namespace ns2d
