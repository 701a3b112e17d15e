#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "tomonet/error.hpp"
#include "tomonet/mlp.hpp"

namespace tomonet {

namespace {

using nlohmann::json;

constexpr std::size_t kMagicLen = 8;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

std::uint32_t crc_of(std::string_view payload) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), static_cast<uInt>(payload.size())));
}

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorKind::CorruptPayload, "checkpoint: " + why); }

json header_of(const Checkpoint& ck) {
  const auto& m = ck.model;
  json selection = {{"labels", ck.meta.measurement_labels}, {"subset_size", ck.meta.subset_size}};
  selection["selection_seed"] = ck.meta.selection_seed ? json(*ck.meta.selection_seed) : json(nullptr);
  return json{
      {"version", kCheckpointVersion},
      {"layer_dims", m.layer_dims},
      {"leak", m.leak},
      {"n_sec", m.n_sec},
      {"n_qubits", ck.meta.n_qubits},
      {"bounds", {{"lo", m.bounds.lo}, {"hi", m.bounds.hi}}},
      {"selection", selection},
      {"training",
       {{"seed", ck.meta.train_seed},
        {"epochs", ck.meta.epochs},
        {"final_loss", ck.meta.final_loss},
        {"epoch_losses", ck.meta.epoch_losses},
        {"config_hash", ck.meta.config_hash}}},
  };
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ck) {
  ck.model.validate();
  const std::string header = header_of(ck).dump();
  std::string payload;
  payload.reserve(ck.model.parameter_count() * 8);
  for (const auto& w : ck.model.weights)
    for (Eigen::Index i = 0; i < w.size(); ++i) put_u64(payload, std::bit_cast<std::uint64_t>(w.data()[i]));

  std::string out(kCheckpointMagic, kMagicLen);
  put_u64(out, header.size());
  out += header;
  out += payload;
  put_u32(out, crc_of(payload));
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagicLen + 8) corrupt("file too short");
  const std::string_view magic = bytes.substr(0, kMagicLen);
  if (magic != std::string_view(kCheckpointMagic, kMagicLen)) {
    if (magic.substr(0, 7) == "TOMONET") throw Error(ErrorKind::VersionMismatch, "unsupported checkpoint format");
    corrupt("bad magic");
  }
  const std::uint64_t header_len = get_le(bytes, kMagicLen, 8);
  const std::size_t header_at = kMagicLen + 8;
  if (header_len > bytes.size() - header_at) corrupt("header length exceeds file size");

  json h;
  try {
    h = json::parse(bytes.substr(header_at, header_len));
  } catch (const json::exception& e) {
    corrupt(std::string("unreadable header: ") + e.what());
  }

  Checkpoint ck;
  try {
    if (h.at("version").get<int>() != kCheckpointVersion)
      throw Error(ErrorKind::VersionMismatch, "checkpoint version " + h.at("version").dump() + " is not supported");
    auto& m = ck.model;
    m.layer_dims = h.at("layer_dims").get<std::vector<std::size_t>>();
    m.leak = h.at("leak").get<double>();
    m.n_sec = h.at("n_sec").get<std::size_t>();
    m.bounds.lo = h.at("bounds").at("lo").get<std::vector<double>>();
    m.bounds.hi = h.at("bounds").at("hi").get<std::vector<double>>();
    ck.meta.n_qubits = h.at("n_qubits").get<std::size_t>();
    const auto& sel = h.at("selection");
    ck.meta.measurement_labels = sel.at("labels").get<std::vector<std::string>>();
    ck.meta.subset_size = sel.at("subset_size").get<std::size_t>();
    if (!sel.at("selection_seed").is_null()) ck.meta.selection_seed = sel.at("selection_seed").get<std::uint64_t>();
    const auto& tr = h.at("training");
    ck.meta.train_seed = tr.at("seed").get<std::uint64_t>();
    ck.meta.epochs = tr.at("epochs").get<std::size_t>();
    ck.meta.final_loss = tr.at("final_loss").get<double>();
    ck.meta.epoch_losses = tr.at("epoch_losses").get<std::vector<double>>();
    ck.meta.config_hash = tr.at("config_hash").get<std::string>();
  } catch (const json::exception& e) {
    corrupt(std::string("malformed header: ") + e.what());
  }
  if (ck.model.layer_dims.size() < 2) corrupt("fewer than two layers");

  std::uint64_t count = 0;
  for (std::size_t l = 0; l + 1 < ck.model.layer_dims.size(); ++l)
    count += (ck.model.layer_dims[l] + 1) * ck.model.layer_dims[l + 1];
  const std::size_t payload_at = header_at + header_len;
  if (bytes.size() - payload_at != count * 8 + 4) corrupt("payload length does not match layer dims");
  const std::string_view payload = bytes.substr(payload_at, count * 8);
  if (get_le(bytes, payload_at + count * 8, 4) != crc_of(payload)) corrupt("payload CRC mismatch");

  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < ck.model.layer_dims.size(); ++l) {
    Matrix w(static_cast<Eigen::Index>(ck.model.layer_dims[l] + 1),
             static_cast<Eigen::Index>(ck.model.layer_dims[l + 1]));
    for (Eigen::Index i = 0; i < w.size(); ++i, offset += 8)
      w.data()[i] = std::bit_cast<double>(get_le(payload, offset, 8));
    ck.model.weights.push_back(std::move(w));
  }
  ck.model.validate();
  return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ck);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::Io, "short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return deserialize_checkpoint(ss.str());
}

}  // namespace tomonet
