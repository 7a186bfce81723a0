#include "pixelrl/actions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "pixelrl/color.hpp"

namespace pixelrl {

namespace {

Action make(int id, std::string name, ActionKind kind) {
  Action a;
  a.id = id;
  a.name = std::move(name);
  a.kind = kind;
  return a;
}

Action filter(int id, std::string name, ActionKind kind) {
  Action a = make(id, std::move(name), kind);
  a.window = 5;
  return a;
}

Action color(int id, std::string name, ActionKind kind, double factor) {
  Action a = make(id, std::move(name), kind);
  a.factor = factor;
  return a;
}

bool is_spatial(ActionKind k) {
  return k == ActionKind::Box || k == ActionKind::Bilateral || k == ActionKind::Median || k == ActionKind::Gaussian;
}

bool is_color(ActionKind k) {
  return k == ActionKind::Contrast || k == ActionKind::Saturation || k == ActionKind::Brightness ||
         k == ActionKind::RedGreen || k == ActionKind::GreenBlue || k == ActionKind::RedBlue;
}

constexpr int kRadius = 2;
constexpr int kWin = 2 * kRadius + 1;
using Table = std::array<double, kWin * kWin>;

// Row-major 5x5 spatial weights exp(-(dx^2+dy^2) / (2 s^2)), optionally normalised.
Table spatial_table(double sigma, bool normalise) {
  Table t{};
  double sum = 0.0;
  for (int dy = -kRadius; dy <= kRadius; ++dy)
    for (int dx = -kRadius; dx <= kRadius; ++dx) {
      const double v = std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      t[(dy + kRadius) * kWin + dx + kRadius] = v;
      sum += v;
    }
  if (normalise)
    for (double& v : t) v /= sum;
  return t;
}

// Evaluates one spatial filter at (y, x) of a single plane.
struct SpatialFilter {
  const Action& action;
  Table weights{};

  explicit SpatialFilter(const Action& a) : action(a) {
    if (a.kind == ActionKind::Gaussian) weights = spatial_table(a.sigma, true);
    if (a.kind == ActionKind::Bilateral) weights = spatial_table(a.sigma_space, false);
  }

  double operator()(std::span<const double> p, int h, int w, int y, int x) const {
    std::array<double, kWin * kWin> v;
    for (int dy = -kRadius; dy <= kRadius; ++dy) {
      const int sy = reflect101(y + dy, h);
      for (int dx = -kRadius; dx <= kRadius; ++dx)
        v[(dy + kRadius) * kWin + dx + kRadius] = p[static_cast<std::size_t>(sy) * w + reflect101(x + dx, w)];
    }
    switch (action.kind) {
      case ActionKind::Box: {
        double acc = 0.0;
        for (double s : v) acc += s;
        return acc / (kWin * kWin);
      }
      case ActionKind::Gaussian: {
        double acc = 0.0;
        for (int i = 0; i < kWin * kWin; ++i) acc += weights[i] * v[i];
        return acc;
      }
      case ActionKind::Bilateral: {
        const double c = p[static_cast<std::size_t>(y) * w + x];
        const double denom = 2.0 * action.sigma_color * action.sigma_color;
        double acc = 0.0, norm = 0.0;
        for (int i = 0; i < kWin * kWin; ++i) {
          const double d = v[i] - c;
          const double wt = weights[i] * std::exp(-(d * d) / denom);
          acc += wt * v[i];
          norm += wt;
        }
        return acc / norm;
      }
      case ActionKind::Median: {
        std::nth_element(v.begin(), v.begin() + (kWin * kWin) / 2, v.end());
        return v[(kWin * kWin) / 2];
      }
      default:
        return p[static_cast<std::size_t>(y) * w + x];
    }
  }
};

double clip01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

void apply_plane(const Action& a, std::span<const double> in, std::span<double> out, int h, int w, Backend backend) {
  if (is_spatial(a.kind)) {
    const SpatialFilter f(a);
    auto row = [&](int y) {
      for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(y) * w + x] = clip01(f(in, h, w, y, x));
    };
    if (backend == Backend::Serial) {
      for (int y = 0; y < h; ++y) row(y);
    } else {
#pragma omp parallel for schedule(static)
      for (int y = 0; y < h; ++y) row(y);
    }
    return;
  }
  const double delta = a.kind == ActionKind::AddOne ? 1.0 / 255.0 : (a.kind == ActionKind::SubtractOne ? -1.0 / 255.0 : 0.0);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = delta == 0.0 ? in[i] : clip01(in[i] + delta);
}

}  // namespace

ActionDomain parse_action_domain(const std::string& name) {
  if (name == "gray-filtering" || name == "gray") return ActionDomain::GrayFiltering;
  if (name == "color-enhancement" || name == "color") return ActionDomain::ColorEnhancement;
  throw InvalidInput("unknown action domain '" + name + "'");
}

std::string to_string(ActionDomain domain) {
  return domain == ActionDomain::GrayFiltering ? "gray-filtering" : "color-enhancement";
}

ActionSet ActionSet::build(ActionDomain domain) {
  ActionSet set;
  set.domain_ = domain;
  auto& a = set.actions_;
  if (domain == ActionDomain::GrayFiltering) {
    a.push_back(filter(0, "box filter", ActionKind::Box));
    Action b1 = filter(1, "bilateral filter sc=1.0", ActionKind::Bilateral);
    b1.sigma_color = 1.0;
    b1.sigma_space = 5.0;
    a.push_back(b1);
    Action b2 = filter(2, "bilateral filter sc=0.1", ActionKind::Bilateral);
    b2.sigma_color = 0.1;
    b2.sigma_space = 5.0;
    a.push_back(b2);
    a.push_back(filter(3, "median filter", ActionKind::Median));
    Action g1 = filter(4, "gaussian filter s=1.5", ActionKind::Gaussian);
    g1.sigma = 1.5;
    a.push_back(g1);
    Action g2 = filter(5, "gaussian filter s=0.5", ActionKind::Gaussian);
    g2.sigma = 0.5;
    a.push_back(g2);
    a.push_back(make(6, "pixel value += 1", ActionKind::AddOne));
    a.push_back(make(7, "pixel value -= 1", ActionKind::SubtractOne));
    a.push_back(make(8, "do nothing", ActionKind::Identity));
  } else if (domain == ActionDomain::ColorEnhancement) {
    const std::pair<const char*, ActionKind> rows[] = {
        {"contrast", ActionKind::Contrast},     {"color saturation", ActionKind::Saturation},
        {"brightness", ActionKind::Brightness}, {"red and green", ActionKind::RedGreen},
        {"green and blue", ActionKind::GreenBlue}, {"red and blue", ActionKind::RedBlue}};
    int id = 0;
    for (const auto& [name, kind] : rows) {
      a.push_back(color(id++, std::string(name) + " x0.95", kind, 0.95));
      a.push_back(color(id++, std::string(name) + " x1.05", kind, 1.05));
    }
    a.push_back(make(id, "do nothing", ActionKind::Identity));
  } else {
    throw InvalidInput("unknown action domain");
  }
  return set;
}

const Action& ActionSet::operator[](int id) const {
  if (id < 0 || id >= size()) throw InvalidInput("action id " + std::to_string(id) + " out of range");
  return actions_[id];
}

int ActionSet::identity_id() const {
  for (const auto& a : actions_)
    if (a.kind == ActionKind::Identity) return a.id;
  throw StateError("action set without identity action");
}

std::string ActionSet::manifest() const {
  std::ostringstream os;
  os << "# domain=" << to_string(domain_) << " actions=" << size() << "\n";
  for (const auto& a : actions_) {
    os << a.id << '\t' << a.name << '\t';
    switch (a.kind) {
      case ActionKind::Box:
      case ActionKind::Median: os << "window=5"; break;
      case ActionKind::Bilateral:
        os << "window=5 sigma_color=" << a.sigma_color << " sigma_space=" << a.sigma_space;
        break;
      case ActionKind::Gaussian: os << "window=5 sigma=" << a.sigma; break;
      case ActionKind::AddOne: os << "delta=+1/255"; break;
      case ActionKind::SubtractOne: os << "delta=-1/255"; break;
      case ActionKind::Identity: os << "-"; break;
      default: os << "factor=" << a.factor; break;
    }
    os << '\n';
  }
  return os.str();
}

void apply_color_pixel(const Action& action, double& r, double& g, double& b) {
  const double f = action.factor;
  switch (action.kind) {
    case ActionKind::Contrast:
      r = 0.5 + f * (r - 0.5);
      g = 0.5 + f * (g - 0.5);
      b = 0.5 + f * (b - 0.5);
      break;
    case ActionKind::Saturation: {
      Hsv hsv = rgb_to_hsv({r, g, b});
      if (hsv[1] > 0.0) {
        hsv[1] = std::min(1.0, hsv[1] * f);
        const Rgb out = hsv_to_rgb(hsv);
        r = out[0];
        g = out[1];
        b = out[2];
      }
      break;
    }
    case ActionKind::Brightness:
      r *= f;
      g *= f;
      b *= f;
      break;
    case ActionKind::RedGreen:
      r *= f;
      g *= f;
      break;
    case ActionKind::GreenBlue:
      g *= f;
      b *= f;
      break;
    case ActionKind::RedBlue:
      r *= f;
      b *= f;
      break;
    default:
      throw InvalidInput("apply_color_pixel: '" + action.name + "' is not a color action");
  }
  r = clip01(r);
  g = clip01(g);
  b = clip01(b);
}

ImagePlane color_adjust(const ImagePlane& img, ActionKind kind, double factor) {
  if (img.channels() != 3) throw InvalidInput("color action on a non-RGB image");
  if (!is_color(kind)) throw InvalidInput("color_adjust: not a color action kind");
  Action a;
  a.kind = kind;
  a.factor = factor;
  ImagePlane out = img;
  auto r = out.channel(0), g = out.channel(1), b = out.channel(2);
  for (std::size_t i = 0; i < r.size(); ++i) apply_color_pixel(a, r[i], g[i], b[i]);
  return out;
}

ImagePlane color_action_semantics(const ImagePlane& img, int action_id) {
  const ActionSet set = ActionSet::build(ActionDomain::ColorEnhancement);
  return apply_action_everywhere(img, action_id, set);
}

ImagePlane apply_action_everywhere(const ImagePlane& img, int action_id, const ActionSet& set, Backend backend) {
  const Action& a = set[action_id];
  if (a.kind == ActionKind::Identity) return img;
  if (is_color(a.kind)) {
    if (img.channels() != 3) throw InvalidInput("color action '" + a.name + "' needs a 3-channel image");
    ImagePlane out = img;
    auto r = out.channel(0), g = out.channel(1), b = out.channel(2);
    for (std::size_t i = 0; i < r.size(); ++i) apply_color_pixel(a, r[i], g[i], b[i]);
    return out;
  }
  ImagePlane out(img.height(), img.width(), img.channels());
  for (int c = 0; c < img.channels(); ++c) apply_plane(a, img.channel(c), out.channel(c), img.height(), img.width(), backend);
  return out;
}

ImagePlane apply_action_map(const ImagePlane& img, const ActionMap& amap, const ActionSet& set, Backend backend) {
  if (amap.height != img.height() || amap.width != img.width())
    throw InvalidInput("apply_action_map: action map and image differ in size");
  std::vector<bool> used(set.size(), false);
  for (auto id : amap.ids) {
    if (id >= set.size()) throw InvalidInput("apply_action_map: action id " + std::to_string(id) + " out of range");
    used[id] = true;
  }
  ImagePlane out = img;
  const std::size_t n = img.pixels();
  for (int id = 0; id < set.size(); ++id) {
    if (!used[id] || set[id].kind == ActionKind::Identity) continue;
    const ImagePlane cand = apply_action_everywhere(img, id, set, backend);
    for (int c = 0; c < img.channels(); ++c) {
      auto src = cand.channel(c);
      auto dst = out.channel(c);
      for (std::size_t i = 0; i < n; ++i)
        if (amap.ids[i] == id) dst[i] = src[i];
    }
  }
  return out;
}

}  // namespace pixelrl
