#ifndef SHUFFLE_SPECTRA_ERRORS_HPP
#define SHUFFLE_SPECTRA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shuffle_spectra {

/// An iterative method failed to reach its tolerance.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// The request exceeds what an exact (enumerating) routine can handle.
class capability_error : public std::runtime_error {
 public:
  explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shuffle_spectra

#endif  // SHUFFLE_SPECTRA_ERRORS_HPP
