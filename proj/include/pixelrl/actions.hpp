#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pixelrl/backend.hpp"
#include "pixelrl/image.hpp"

namespace pixelrl {

enum class ActionDomain { GrayFiltering, ColorEnhancement };

enum class ActionKind {
  Box,
  Bilateral,
  Median,
  Gaussian,
  AddOne,
  SubtractOne,
  Contrast,
  Saturation,
  Brightness,
  RedGreen,
  GreenBlue,
  RedBlue,
  Identity,
};

/// One catalog entry. `sigma_color`/`sigma` are used by the bilateral and
/// Gaussian filters; `factor` by the color actions. All spatial filters use a
/// 5x5 window with reflect-101 borders.
struct Action {
  int id = 0;
  std::string name;
  ActionKind kind = ActionKind::Identity;
  int window = 1;
  double sigma_color = 0.0;
  double sigma_space = 0.0;
  double sigma = 0.0;
  double factor = 1.0;
};

class ActionSet {
 public:
  static ActionSet build(ActionDomain domain);

  ActionDomain domain() const { return domain_; }
  int size() const { return static_cast<int>(actions_.size()); }
  const Action& operator[](int id) const;
  const std::vector<Action>& actions() const { return actions_; }
  int identity_id() const;

  /// One line per action: "id<TAB>name<TAB>parameters".
  std::string manifest() const;

 private:
  ActionDomain domain_ = ActionDomain::GrayFiltering;
  std::vector<Action> actions_;
};

ActionDomain parse_action_domain(const std::string& name);
std::string to_string(ActionDomain domain);

/// Per-pixel field of action ids.
struct ActionMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> ids;

  ActionMap() = default;
  ActionMap(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), ids(static_cast<std::size_t>(h) * w, fill) {}

  std::uint8_t& at(int y, int x) { return ids[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int y, int x) const { return ids[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return ids.size(); }

  friend bool operator==(const ActionMap&, const ActionMap&) = default;
};

/// Full-image candidate for one action, clipped to [0,1]. Gray filters act on
/// every channel independently; color actions need a 3-channel image.
ImagePlane apply_action_everywhere(const ImagePlane& img, int action_id, const ActionSet& set,
                                   Backend backend = Backend::OpenMP);

/// Pixel i of the result is pixel i of apply_action_everywhere(img, amap[i]).
ImagePlane apply_action_map(const ImagePlane& img, const ActionMap& amap, const ActionSet& set,
                            Backend backend = Backend::OpenMP);

/// Pointwise color transform of a color action at a single pixel.
/// Identity and gray filter kinds are rejected.
void apply_color_pixel(const Action& action, double& r, double& g, double& b);

/// Color action on a whole 3-channel image.
ImagePlane color_action_semantics(const ImagePlane& img, int action_id);

/// Color adjustment with an arbitrary factor (used to synthesize target styles).
ImagePlane color_adjust(const ImagePlane& img, ActionKind kind, double factor);

}  // namespace pixelrl
