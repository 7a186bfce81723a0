#include "pixelrl/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace pixelrl {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'P', 'X', 'R', 'L', 'C', 'K', 'P', 'T'};

template <class T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw InvalidInput("checkpoint: truncated file");
  return v;
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t n) {
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw InvalidInput("checkpoint: truncated payload");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  nlohmann::json h = {
      {"arch", nlohmann::json::parse(c.network.arch().to_json())},
      {"episode", c.episode},
      {"phase", to_string(c.phase)},
      {"config", c.config_text},
      {"params", c.network.param_count()},
      {"kernel_side", c.kernel.side()},
      {"kernel_trainable", c.kernel.trainable()},
      {"network_adam", {{"step", c.network_adam.step}, {"size", c.network_adam.m.size()}}},
      {"kernel_adam", {{"step", c.kernel_adam.step}, {"size", c.kernel_adam.m.size()}}},
  };
  const std::string header = h.dump();
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("checkpoint: cannot write " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    write_pod(out, kCheckpointVersion);
    write_pod(out, static_cast<std::uint64_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    write_doubles(out, c.network.params());
    write_doubles(out, c.kernel.weights());
    write_doubles(out, c.network_adam.m);
    write_doubles(out, c.network_adam.v);
    write_doubles(out, c.kernel_adam.m);
    write_doubles(out, c.kernel_adam.v);
    if (!out) throw InvalidInput("checkpoint: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw InvalidInput("checkpoint: bad magic in " + path.string());
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw InvalidInput("checkpoint: unsupported version " + std::to_string(version));
  const auto len = read_pod<std::uint64_t>(in);
  if (len > (1u << 26)) throw InvalidInput("checkpoint: implausible header length");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw InvalidInput("checkpoint: truncated header");

  Checkpoint c;
  try {
    const auto h = nlohmann::json::parse(header);
    c.network = Network(Architecture::from_json(h.at("arch").dump()));
    if (h.at("params").get<std::size_t>() != c.network.param_count())
      throw InvalidInput("checkpoint: parameter count does not match architecture");
    c.episode = h.at("episode").get<int>();
    c.phase = parse_phase(h.at("phase").get<std::string>());
    c.config_text = h.at("config").get<std::string>();
    c.kernel = RewardKernel(h.at("kernel_side").get<int>(), h.at("kernel_trainable").get<bool>());
    c.network_adam.step = h.at("network_adam").at("step").get<long long>();
    c.kernel_adam.step = h.at("kernel_adam").at("step").get<long long>();
    const auto na = h.at("network_adam").at("size").get<std::size_t>();
    const auto ka = h.at("kernel_adam").at("size").get<std::size_t>();
    c.network.params() = read_doubles(in, c.network.param_count());
    c.kernel.weights() = read_doubles(in, c.kernel.weights().size());
    c.network_adam.m = read_doubles(in, na);
    c.network_adam.v = read_doubles(in, na);
    c.kernel_adam.m = read_doubles(in, ka);
    c.kernel_adam.v = read_doubles(in, ka);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("checkpoint: bad header: ") + e.what());
  }
  return c;
}

}  // namespace pixelrl
