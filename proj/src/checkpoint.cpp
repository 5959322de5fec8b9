#include "hynn/checkpoint.hpp"

#include "json.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace hynn {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

json space_json(const ComponentSpaceConfig& s) {
  return {{"encoder", to_string(s.encoder)},
          {"attention", to_string(s.attention)},
          {"concat", to_string(s.concat)},
          {"mlr", to_string(s.mlr)}};
}

SpaceTag space_from(const std::string& s) {
  if (s == "hyperbolic") return SpaceTag::Hyperbolic;
  if (s == "euclidean") return SpaceTag::Euclidean;
  throw std::runtime_error("bad space tag: " + s);
}

json config_json(const ModelConfig& c) {
  return {{"d_M", c.d_M},
          {"d_C", c.d_C},
          {"d_S", c.d_S},
          {"embed_dim", c.embed_dim},
          {"K", c.K},
          {"char_vocab", c.char_vocab},
          {"max_mention_len", c.max_mention_len},
          {"max_rel", c.max_rel},
          {"dropout_input", c.dropout_input},
          {"dropout_concat", c.dropout_concat},
          {"spaces", space_json(c.spaces)}};
}

ModelConfig config_from(const json& j) {
  ModelConfig c;
  c.d_M = j.at("d_M");
  c.d_C = j.at("d_C");
  c.d_S = j.at("d_S");
  c.embed_dim = j.at("embed_dim");
  c.K = j.at("K");
  c.char_vocab = j.at("char_vocab");
  c.max_mention_len = j.at("max_mention_len");
  c.max_rel = j.at("max_rel");
  c.dropout_input = j.at("dropout_input");
  c.dropout_concat = j.at("dropout_concat");
  const auto& s = j.at("spaces");
  c.spaces.encoder = space_from(s.at("encoder"));
  c.spaces.attention = space_from(s.at("attention"));
  c.spaces.concat = space_from(s.at("concat"));
  c.spaces.mlr = space_from(s.at("mlr"));
  return c;
}

void write_blob(std::ofstream& out, const ad::Vec& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

ad::Vec read_blob(std::ifstream& in, std::int64_t n) {
  ad::Vec v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("checkpoint truncated while reading tensor data");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json header;
  header["config"] = config_json(ckpt.config);
  json labels = json::array();
  for (int i = 0; i < ckpt.inventory.size(); ++i)
    labels.push_back({{"name", ckpt.inventory.labels[i]},
                      {"granularity", to_string(ckpt.inventory.granularity[i])}});
  header["labels"] = labels;
  json tensors = json::array();
  for (const auto& e : ckpt.params.entries)
    tensors.push_back({{"name", e.name},
                       {"manifold", e.manifold == Manifold::PoincareBall ? "ball" : "euclidean"},
                       {"rows", e.rows},
                       {"cols", e.cols}});
  header["tensors"] = tensors;
  header["optimizer"] = {{"step", ckpt.opt_step},
                         {"learning_rate", ckpt.opt_config.learning_rate},
                         {"beta1", ckpt.opt_config.beta1},
                         {"beta2", ckpt.opt_config.beta2},
                         {"eps", ckpt.opt_config.eps},
                         {"weight_decay", ckpt.opt_config.weight_decay},
                         {"max_grad_norm", ckpt.opt_config.max_grad_norm},
                         {"has_state", !ckpt.opt_state.empty()}};
  std::string hs = header.dump();

  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp);
    out.write(kMagic, 4);
    std::uint32_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), 4);
    std::uint64_t hlen = hs.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& e : ckpt.params.entries) write_blob(out, e.value);
    for (const auto& st : ckpt.opt_state) {
      write_blob(out, st.m);
      write_blob(out, st.v);
    }
    if (!out) throw std::runtime_error("write failure on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 8);
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("checkpoint truncated in header");
  json header = json::parse(hs);

  Checkpoint ckpt;
  ckpt.config = config_from(header.at("config"));
  for (const auto& l : header.at("labels"))
    ckpt.inventory.add(l.at("name"), granularity_from_string(l.at("granularity")));
  const auto& opt = header.at("optimizer");
  ckpt.opt_step = opt.at("step");
  ckpt.opt_config.learning_rate = opt.at("learning_rate");
  ckpt.opt_config.beta1 = opt.at("beta1");
  ckpt.opt_config.beta2 = opt.at("beta2");
  ckpt.opt_config.eps = opt.at("eps");
  ckpt.opt_config.weight_decay = opt.at("weight_decay");
  ckpt.opt_config.max_grad_norm = opt.at("max_grad_norm");

  for (const auto& t : header.at("tensors")) {
    int rows = t.at("rows"), cols = t.at("cols");
    Manifold m = t.at("manifold") == "ball" ? Manifold::PoincareBall : Manifold::Euclidean;
    ckpt.params.add(t.at("name"), m, rows, cols, read_blob(in, std::int64_t(rows) * cols));
  }
  if (opt.at("has_state").get<bool>()) {
    for (const auto& e : ckpt.params.entries) {
      Adam::State st;
      st.m = read_blob(in, e.value.size());
      st.v = read_blob(in, e.value.size());
      ckpt.opt_state.push_back(std::move(st));
    }
  }
  return ckpt;
}

}  // namespace hynn
