#ifndef SHUFFLE_SPECTRA_SHUFFLE_SPECTRA_HPP
#define SHUFFLE_SPECTRA_SHUFFLE_SPECTRA_HPP

#include "deck.hpp"
#include "errors.hpp"
#include "exact_mixing.hpp"
#include "grid_kernel.hpp"
#include "ideal.hpp"
#include "kernel_io.hpp"
#include "parallel.hpp"
#include "perm_distribution.hpp"
#include "rng.hpp"
#include "shuffles.hpp"
#include "single_card.hpp"
#include "spectral.hpp"
#include "test_statistic.hpp"

#endif  // SHUFFLE_SPECTRA_SHUFFLE_SPECTRA_HPP
