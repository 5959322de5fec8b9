#include "hynn/model.hpp"

namespace hynn {

using ad::Var;

void ModelConfig::validate() const {
  if (d_M <= 0 || d_C <= 0 || d_S <= 0) throw std::invalid_argument("dims must be positive");
  if (embed_dim <= 0) throw std::invalid_argument("embed_dim must be positive");
  if (K <= 0) throw std::invalid_argument("label count must be positive");
  if (dropout_input < 0.0 || dropout_input >= 1.0 || dropout_concat < 0.0 || dropout_concat >= 1.0)
    throw std::invalid_argument("dropout rates must be in [0, 1)");
  if (max_mention_len <= 0 || max_rel <= 0)
    throw std::invalid_argument("position table sizes must be positive");
}

namespace {

Manifold manifold_of(SpaceTag s) {
  return s == SpaceTag::Hyperbolic ? Manifold::PoincareBall : Manifold::Euclidean;
}

}  // namespace

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(seed);

  auto glorot_mat = [&](const std::string& name, int rows, int cols) {
    double limit = std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> u(-limit, limit);
    ad::Vec v(rows * cols);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
    return params_.add(name, Manifold::Euclidean, rows, cols, std::move(v));
  };
  auto bias = [&](const std::string& name, int dim, SpaceTag s) {
    return params_.add(name, manifold_of(s), dim, 1, ad::Vec::Zero(dim));
  };
  auto small_point = [&](const std::string& name, int dim, SpaceTag s) {
    std::uniform_real_distribution<double> u(-1e-4, 1e-4);
    ad::Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = u(rng);
    if (s == SpaceTag::Hyperbolic) v = exp0(v);
    return params_.add(name, manifold_of(s), dim, 1, std::move(v));
  };
  auto glorot_vec = [&](const std::string& name, int dim) {
    double limit = std::sqrt(6.0 / (dim + 1));
    std::uniform_real_distribution<double> u(-limit, limit);
    ad::Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = u(rng);
    return params_.add(name, Manifold::Euclidean, dim, 1, std::move(v));
  };

  const auto& sp = cfg_.spaces;
  const int n = cfg_.embed_dim;

  mention_ffnn_ = Linear{sp.encoder, glorot_mat("mention_ffnn.M", cfg_.d_M, n),
                         bias("mention_ffnn.b", cfg_.d_M, sp.encoder), cfg_.d_M, n,
                         Activation::Tanh};

  oov_embedding_ = small_point("embeddings.oov", n, sp.encoder);

  char_embeddings_.reserve(cfg_.char_vocab);
  for (int c = 0; c < cfg_.char_vocab; ++c)
    char_embeddings_.push_back(
        small_point("char_embeddings." + std::to_string(c), cfg_.d_C, sp.encoder));
  char_rnn_ = RNNCell{sp.encoder,
                      glorot_mat("char_rnn.W", cfg_.d_C, cfg_.d_C),
                      glorot_mat("char_rnn.U", cfg_.d_C, cfg_.d_C),
                      bias("char_rnn.b", cfg_.d_C, sp.encoder),
                      cfg_.d_C,
                      cfg_.d_C,
                      Activation::Identity};

  auto gru = [&](const std::string& prefix) {
    GRUCell cell;
    cell.space = sp.encoder;
    cell.dim = cfg_.d_S;
    cell.in_dim = n;
    cell.Wr = glorot_mat(prefix + ".Wr", cfg_.d_S, cfg_.d_S);
    cell.Ur = glorot_mat(prefix + ".Ur", cfg_.d_S, n);
    cell.br = bias(prefix + ".br", cfg_.d_S, sp.encoder);
    cell.Wz = glorot_mat(prefix + ".Wz", cfg_.d_S, cfg_.d_S);
    cell.Uz = glorot_mat(prefix + ".Uz", cfg_.d_S, n);
    cell.bz = bias(prefix + ".bz", cfg_.d_S, sp.encoder);
    cell.W = glorot_mat(prefix + ".W", cfg_.d_S, cfg_.d_S);
    cell.U = glorot_mat(prefix + ".U", cfg_.d_S, n);
    cell.b = bias(prefix + ".b", cfg_.d_S, sp.encoder);
    return cell;
  };
  gru_fwd_ = gru("gru_fwd");
  gru_bwd_ = gru("gru_bwd");

  token_concat_ = Concat2{sp.encoder,
                          glorot_mat("token_concat.M1", 2 * cfg_.d_S, cfg_.d_S),
                          glorot_mat("token_concat.M2", 2 * cfg_.d_S, cfg_.d_S),
                          bias("token_concat.b", 2 * cfg_.d_S, sp.encoder),
                          2 * cfg_.d_S,
                          cfg_.d_S,
                          cfg_.d_S};

  auto attention = [&](const std::string& prefix, int dim, int table_len) {
    DistanceAttention att;
    att.space = sp.attention;
    att.dim = dim;
    att.Wq = glorot_mat(prefix + ".Wq", dim, dim);
    att.bq = bias(prefix + ".bq", dim, sp.attention);
    att.Wk = glorot_mat(prefix + ".Wk", dim, dim);
    att.bk = bias(prefix + ".bk", dim, sp.attention);
    att.beta = params_.add(prefix + ".beta", Manifold::Euclidean, 1, 1, ad::Vec::Constant(1, 1.0));
    for (int i = 0; i < table_len; ++i)
      att.position_table.push_back(
          small_point(prefix + ".pos." + std::to_string(i), dim, sp.attention));
    return att;
  };
  mention_attention_ = attention("mention_attention", cfg_.d_M, cfg_.max_mention_len);
  context_attention_ = attention("context_attention", 2 * cfg_.d_S, 2 * cfg_.max_rel + 1);

  final_concat_ = Concat3{sp.concat,
                          glorot_mat("final_concat.M1", cfg_.m(), cfg_.d_M),
                          glorot_mat("final_concat.M2", cfg_.m(), cfg_.d_C),
                          glorot_mat("final_concat.M3", cfg_.m(), 2 * cfg_.d_S),
                          bias("final_concat.b", cfg_.m(), sp.concat),
                          cfg_.m(),
                          cfg_.d_M,
                          cfg_.d_C,
                          2 * cfg_.d_S};

  mlr_.space = sp.mlr;
  mlr_.dim = cfg_.m();
  for (int k = 0; k < cfg_.K; ++k) {
    mlr_.p.push_back(small_point("mlr.p." + std::to_string(k), cfg_.m(), sp.mlr));
    mlr_.a.push_back(glorot_vec("mlr.a." + std::to_string(k), cfg_.m()));
  }
}

Var Model::bridge(Ctx&, Var x, SpaceTag from, SpaceTag to) const {
  if (from == to) return x;
  crossings_++;
  return from == SpaceTag::Hyperbolic ? to_euclidean(x) : to_hyperbolic(x);
}

Var Model::embed_token(Ctx& ctx, const std::string& token, const EmbeddingTable& table) const {
  bool hyp = cfg_.spaces.encoder == SpaceTag::Hyperbolic;
  auto v = table.lookup(token, hyp);
  Var w = v ? ctx.tape.constant(*v) : ctx.leaf(oov_embedding_);
  return dropout(ctx, cfg_.spaces.encoder, w, cfg_.dropout_input);
}

std::pair<Var, Var> Model::encode_mention(Ctx& ctx, const TypedExample& ex,
                                          const EmbeddingTable& table) const {
  if (ex.mention_tokens.empty()) throw std::invalid_argument("encode_mention: empty mention");
  const auto& sp = cfg_.spaces;

  // word path
  std::vector<Var> states;
  std::vector<int> positions;
  for (size_t i = 0; i < ex.mention_tokens.size(); ++i) {
    Var w = embed_token(ctx, ex.mention_tokens[i], table);
    states.push_back(mention_ffnn_.forward(ctx, w));
    positions.push_back(std::min<int>(static_cast<int>(i), cfg_.max_mention_len - 1));
  }
  if (sp.encoder != sp.attention) {
    for (auto& s : states) s = sp.encoder == SpaceTag::Hyperbolic ? to_euclidean(s) : to_hyperbolic(s);
    crossings_++;
  }
  Var m = mention_attention_.forward(ctx, states, positions);

  // char path
  std::vector<Var> hs;
  Var h = ctx.tape.constant(ad::Vec::Zero(cfg_.d_C));
  for (char c : ex.mention_chars) {
    int id = static_cast<unsigned char>(c) % cfg_.char_vocab;
    h = char_rnn_.step(ctx, h, ctx.leaf(char_embeddings_[id]));
    hs.push_back(h);
  }
  if (hs.empty()) hs.push_back(h);
  if (sp.encoder != sp.attention) {
    for (auto& s : hs) s = sp.encoder == SpaceTag::Hyperbolic ? to_euclidean(s) : to_hyperbolic(s);
    crossings_++;
  }
  Var c = pool_midpoint(ctx, sp.attention, hs);
  return {m, c};
}

Var Model::encode_context(Ctx& ctx, const TypedExample& ex, const EmbeddingTable& table) const {
  if (ex.context_tokens.empty()) throw std::invalid_argument("encode_context: empty context");
  const auto& sp = cfg_.spaces;
  const int l = static_cast<int>(ex.context_tokens.size());

  std::vector<Var> inputs;
  inputs.reserve(l);
  for (const auto& tok : ex.context_tokens) inputs.push_back(embed_token(ctx, tok, table));

  std::vector<Var> fwd(l), bwd(l);
  Var h = ctx.tape.constant(ad::Vec::Zero(cfg_.d_S));
  for (int i = 0; i < l; ++i) {
    h = gru_fwd_.step(ctx, h, inputs[i]);
    fwd[i] = h;
  }
  h = ctx.tape.constant(ad::Vec::Zero(cfg_.d_S));
  for (int i = l - 1; i >= 0; --i) {
    h = gru_bwd_.step(ctx, h, inputs[i]);
    bwd[i] = h;
  }

  std::vector<Var> states;
  std::vector<int> positions;
  for (int i = 0; i < l; ++i) {
    states.push_back(token_concat_.forward(ctx, fwd[i], bwd[i]));
    int offset = i < ex.span_begin ? i - ex.span_begin
                                   : (i >= ex.span_end ? i - ex.span_end + 1 : 0);
    offset = std::clamp(offset, -cfg_.max_rel, cfg_.max_rel);
    positions.push_back(offset + cfg_.max_rel);
  }
  if (sp.encoder != sp.attention) {
    for (auto& s : states) s = sp.encoder == SpaceTag::Hyperbolic ? to_euclidean(s) : to_hyperbolic(s);
    crossings_++;
  }
  return context_attention_.forward(ctx, states, positions);
}

Var Model::text_vector(Ctx& ctx, const TypedExample& ex, const EmbeddingTable& table) const {
  const auto& sp = cfg_.spaces;
  auto [m, c] = encode_mention(ctx, ex, table);
  Var s = encode_context(ctx, ex, table);
  if (sp.attention != sp.concat) {
    auto conv = [&](Var x) {
      return sp.attention == SpaceTag::Hyperbolic ? to_euclidean(x) : to_hyperbolic(x);
    };
    m = conv(m);
    c = conv(c);
    s = conv(s);
    crossings_++;
  }
  return final_concat_.forward(ctx, m, c, s);
}

Var Model::classify(Ctx& ctx, const TypedExample& ex, const EmbeddingTable& table) const {
  Var final = text_vector(ctx, ex, table);
  final = dropout(ctx, cfg_.spaces.concat, final, cfg_.dropout_concat);
  final = bridge(ctx, final, cfg_.spaces.concat, cfg_.spaces.mlr);
  return mlr_.logits(ctx, final);
}

double Model::text_vector_norm(const TypedExample& ex, const EmbeddingTable& table) const {
  ad::Tape tape;
  Ctx ctx(tape, params_);
  ad::Vec v = tape.value(text_vector(ctx, ex, table));
  if (cfg_.spaces.concat == SpaceTag::Hyperbolic) return distance(ad::Vec::Zero(v.size()), v);
  return v.norm();
}

ad::Vec Model::predict_logits(const TypedExample& ex, const EmbeddingTable& table) const {
  ad::Tape tape;
  Ctx ctx(tape, params_);
  return tape.value(classify(ctx, ex, table));
}

double Model::class_point_distance(int j, int k) const {
  const ad::Vec& pj = params_.entries[mlr_.p[j]].value;
  const ad::Vec& pk = params_.entries[mlr_.p[k]].value;
  if (cfg_.spaces.mlr == SpaceTag::Hyperbolic) return distance(pj, pk);
  return (pj - pk).norm();
}

}  // namespace hynn
