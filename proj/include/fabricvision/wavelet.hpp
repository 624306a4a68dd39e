#pragma once

#include <string>
#include <vector>

#include "fabricvision/image.hpp"

namespace fabricvision {

// Two-channel orthonormal analysis bank. The default (and only shipped)
// bank is Haar; any bank satisfying sum(h^2) = sum(g^2) = 1 and
// sum(h_k g_k) = 0 can be plugged in without API changes.
struct FilterBank {
    std::vector<double> lowpass;
    std::vector<double> highpass;
    std::string name;

    static FilterBank haar();

    // Throws ArgumentError when the orthonormality conditions fail.
    void validate() const;
};

// One decomposition level: the three detail subbands at that scale.
struct SubbandLevel {
    GrayImage hl;  // highpass along x, lowpass along y
    GrayImage lh;  // lowpass along x, highpass along y
    GrayImage hh;  // highpass along both axes
};

// Multi-level pyramid. Raw subband coefficients are stored unnormalized;
// `approximation` applies the per-level lowpass gain so the output returns
// to intensity scale.
struct WaveletPyramid {
    int levels = 0;
    int original_width = 0;
    int original_height = 0;
    int padded_width = 0;   // original extended to a multiple of 2^levels
    int padded_height = 0;
    std::vector<SubbandLevel> details;  // index 0 = finest level (level 1)
    GrayImage final_ll;                 // coarsest approximation, raw scale

    // Sum of squares over every stored coefficient (all details + final LL).
    // Equals the padded-input energy for an orthonormal bank.
    double coefficient_energy() const;
};

// Extends an image to (new_width x new_height) by half-sample symmetric
// (mirror) extension on the right and bottom edges. Constant images stay
// constant. Used internally by decompose; exposed for energy accounting.
GrayImage symmetric_extend(const GrayImage& img, int new_width, int new_height);

// Recursive separable analysis: per level, rows then columns are filtered
// with the bank (output index pattern y_k = sum_t f_t x_{2k+t}) and decimated
// by two. The input is first symmetrically extended to a multiple of
// 2^levels so every intermediate stage has even extent.
WaveletPyramid decompose(const GrayImage& img, int levels, const FilterBank& bank = FilterBank::haar());

// Inverse transform; crops the result back to the original size. Perfect
// reconstruction (<= 1e-10 max-abs) for orthonormal banks.
GrayImage reconstruct(const WaveletPyramid& pyr, const FilterBank& bank = FilterBank::haar());

// Final LL rescaled by 2^-levels so a constant-c input yields a constant-c
// approximation (the Haar lowpass gains sqrt(2) per axis per level).
GrayImage approximation(const WaveletPyramid& pyr);

// Diagnostic dump: every subband (plus the final LL) written as PGM with
// min-max normalization into `dir` (lossy by design). Returns written paths.
std::vector<std::string> dump_subbands(const WaveletPyramid& pyr, const std::string& dir);

}  // namespace fabricvision
