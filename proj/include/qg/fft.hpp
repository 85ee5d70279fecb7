#pragma once

#include <span>

#include "qg/field.hpp"

namespace qg {

// Thin wrapper around FFTW real-to-complex transforms. Plans are created once
// per grid size under a lock; execution is reentrant.

/// Unnormalized forward transform of n*n real samples into the half spectrum.
void forward_fft(const GridSpec& grid, std::span<const double> in, std::span<Complex> out);

/// Inverse transform including the 1/n^2 normalization. `in` is not modified.
void inverse_fft(const GridSpec& grid, std::span<const Complex> in, std::span<double> out);

}  // namespace qg
