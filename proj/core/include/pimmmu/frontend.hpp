#pragma once

#include <cstdint>

#include "pimmmu/controller.hpp"

namespace pimmmu {

// A request source clocked by the engine: the DCE or the host model.
class Frontend {
 public:
  virtual ~Frontend() = default;
  virtual void tick(std::uint64_t cycle) = 0;
  virtual void on_completion(const Completion& c) = 0;
  virtual bool done() const = 0;
};

}  // namespace pimmmu
