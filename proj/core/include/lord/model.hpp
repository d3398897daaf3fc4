#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lord/dataset.hpp"

namespace lord {

// Uniform scoring contract shared by every classifier family: confidences
// over the known classes plus an unknown channel, together with the model's
// own argmax decision. Pseudo-label winners arrive already mapped to the
// unknown marker, with their confidence on the unknown channel.
struct ModelScore {
    std::vector<double> known;   // aligned with known_classes() order
    double unknown = 0.0;
    std::string predicted;       // element of known_classes() or the unknown marker
};

inline double known_max(const ModelScore& s) {
    return s.known.empty() ? 0.0 : *std::max_element(s.known.begin(), s.known.end());
}

class OpenSetModel {
public:
    virtual ~OpenSetModel() = default;
    virtual const std::vector<std::string>& known_classes() const = 0;
    virtual std::size_t dim() const = 0;
    virtual ModelScore score(std::span<const double> x) const = 0;
};

}  // namespace lord
