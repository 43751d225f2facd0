// Copyright 2026 The formstruct Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "formstruct/checkpoint.hpp"
#include "formstruct/error.hpp"
#include "formstruct/model.hpp"
#include "helpers.hpp"
#include "oracles/oracles.hpp"

using namespace formstruct;

namespace {

using M = Matrix<double>;

struct Fixture {
  Form form = testing::KitchenSinkForm();
  Vocab vocab = testing::VocabFor(form);
  AnnotatedSequence source = SerializeForm(form, vocab);
  std::vector<int> dec_ids = {kBos, 20, 21, 22, 23};
  std::vector<TokenAnnotation> dec_ann = TargetAnnotations(TokenRole::kOption, 3, 5);
  std::vector<int> targets = {20, 21, 22, 23, kEos};
  ModelConfig config = testing::TinyConfig(static_cast<int>(vocab.size()));
};

void Randomize(Seq2SeqModel<double>& model, unsigned seed, double scale) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  for (auto* p : model.parameters()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = dist(gen);
  }
}

// LM loss on the decoder plus classification loss on the same source.
double Loss(Seq2SeqModel<double>& model, const Fixture& f, bool backward) {
  nn::Tape<double> t;
  const auto ids = f.source.ids();
  const auto ann = f.source.annotations();
  const nn::Var memory = model.Encode(t, ids, ann);
  const nn::Var h = model.Decode(t, memory, ann, f.dec_ids, f.dec_ann);
  const nn::Var lm = nn::CrossEntropy<double>(t, model.LmLogits(t, h), f.targets, -1, 0.2);
  const nn::Var hc = model.Decode(t, memory, ann, ids, ann);
  const std::vector<int> cls = {5};
  const nn::Var ce = nn::CrossEntropy<double>(t, model.ClassLogits(t, hc), cls, -1, 1.0);
  const nn::Var loss = nn::Add<double>(t, lm, ce);
  if (backward) t.Backward(loss);
  return t.value(loss)(0, 0);
}

}  // namespace

TEST_CASE("config validation and map round trip") {
  ModelConfig c = testing::TinyConfig(100);
  c.variant = AttentionVariant::kHybridStar;
  c.sites.decoder_cross = false;
  c.per_head_bias = true;
  c.dropout = 0.25;
  const ModelConfig back = ModelConfig::FromMap(c.ToMap());
  CHECK(back.ToMap() == c.ToMap());
  CHECK(back.per_head_bias);
  CHECK_FALSE(back.sites.decoder_cross);
  CHECK(back.variant == AttentionVariant::kHybridStar);
  CHECK(c.decoder_positions() == 128);

  ModelConfig bad = c;
  bad.n_heads = 3;
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad = c;
  bad.vocab_size = 10;
  CHECK_THROWS_AS(Seq2SeqModel<float>(bad, 1), Error);
}

TEST_CASE("parameter inventory") {
  Fixture f;
  f.config.per_head_bias = true;
  Seq2SeqModel<float> model(f.config, 3);
  std::set<std::string> names;
  for (const auto* p : model.parameters()) CHECK(names.insert(p->name).second);
  CHECK(model.parameter("embed_tokens").value.rows() == static_cast<Eigen::Index>(f.vocab.size()));
  CHECK(model.parameter("decoder.embed_positions").value.rows() == 128);
  CHECK(model.parameter("classification_head.weight").value.cols() == kNumBlockTypes);
  CHECK(model.parameter("encoder.layers.0.self_attn.struct.h1.type_table").value.rows() == kNumTokenRoles);
  CHECK(PositiveReparam(model.parameter("decoder.layers.0.encoder_attn.struct.h0.lambda_raw").value(0, 0)) ==
        doctest::Approx(1.0));
  CHECK(PositiveReparam(model.parameter("decoder.layers.0.self_attn.struct.h0.mu_raw").value(0, 0)) ==
        doctest::Approx(0.1));
  CHECK_THROWS_AS(model.parameter("nope"), Error);
  f.config.per_head_bias = false;
  Seq2SeqModel<float> shared(f.config, 3);
  CHECK_NOTHROW(shared.parameter("encoder.layers.0.self_attn.struct.type_table"));
}

TEST_CASE("forward shapes and determinism") {
  Fixture f;
  Seq2SeqModel<float> a(f.config, 9), b(f.config, 9), c(f.config, 10);
  const Matrix<float> la = ForwardSeq2Seq(a, f.source, f.dec_ids, f.dec_ann);
  CHECK(la.rows() == 5);
  CHECK(la.cols() == static_cast<Eigen::Index>(f.vocab.size()));
  CHECK(la == ForwardSeq2Seq(b, f.source, f.dec_ids, f.dec_ann));
  CHECK(la != ForwardSeq2Seq(c, f.source, f.dec_ids, f.dec_ann));

  const auto logits = ClassifyBlockType(a, f.source);
  double z = 0.0;
  for (float v : logits) z += std::exp(static_cast<double>(v));
  double total = 0.0;
  for (float v : logits) total += std::exp(static_cast<double>(v)) / z;
  CHECK(total == doctest::Approx(1.0));

  nn::Tape<float> t;
  const std::vector<int> too_long(129, 20);
  const std::vector<TokenAnnotation> ann(129);
  CHECK_THROWS_AS(a.Encode(t, too_long, ann), Error);
  const auto ids = f.source.ids();
  const std::vector<TokenAnnotation> short_ann(3);
  CHECK_THROWS_AS(a.Encode(t, ids, short_ann), Error);
}

TEST_CASE("decoder is causal") {
  Fixture f;
  Seq2SeqModel<double> model(f.config, 4);
  Randomize(model, 4, 0.3);
  const M base = ForwardSeq2Seq(model, f.source, f.dec_ids, f.dec_ann);
  std::vector<int> changed = f.dec_ids;
  changed[3] = 30;
  changed[4] = 31;
  const M other = ForwardSeq2Seq(model, f.source, changed, f.dec_ann);
  CHECK((base.topRows(3) - other.topRows(3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((base.bottomRows(2) - other.bottomRows(2)).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("structure-free biases reduce to the plain transformer") {
  Fixture f;
  ModelConfig off = f.config;
  off.sites = {false, false, false};
  Seq2SeqModel<double> plain(off, 6), structured(f.config, 6);
  Randomize(plain, 6, 0.3);
  Randomize(structured, 6, 0.3);
  // A bias that is constant along each query row cancels in the softmax.
  for (auto* p : structured.parameters()) {
    if (p->name.ends_with(".lambda_raw")) p->value(0, 0) = -60.0;
    if (p->name.ends_with(".type_table")) {
      for (int r = 0; r < kNumTokenRoles; ++r) p->value.row(r).setConstant(0.1 * r);
    }
  }
  const M a = ForwardSeq2Seq(plain, f.source, f.dec_ids, f.dec_ann);
  const M b = ForwardSeq2Seq(structured, f.source, f.dec_ids, f.dec_ann);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);

  // With the sites off, annotations are irrelevant.
  AnnotatedSequence scrambled = f.source;
  for (auto& tok : scrambled.tokens) tok.block_index = 3;
  CHECK((ForwardSeq2Seq(plain, scrambled, f.dec_ids, f.dec_ann) - a).cwiseAbs().maxCoeff() == 0.0);
  Randomize(structured, 7, 0.3);
  CHECK((ForwardSeq2Seq(structured, scrambled, f.dec_ids, f.dec_ann) -
         ForwardSeq2Seq(structured, f.source, f.dec_ids, f.dec_ann))
            .cwiseAbs()
            .maxCoeff() > 1e-6);
}

TEST_CASE("whole-model gradients match central differences") {
  for (auto variant : {AttentionVariant::kHybrid, AttentionVariant::kHybridStar}) {
    for (bool per_head : {false, true}) {
      Fixture f;
      f.config.variant = variant;
      f.config.per_head_bias = per_head;
      Seq2SeqModel<double> model(f.config, 2);
      Randomize(model, 11, 0.4);
      model.ZeroGrad();
      Loss(model, f, true);
      std::mt19937 pick(5);
      for (auto* p : model.parameters()) {
        const M analytic = p->grad;
        // Eight entries per tensor, always including the first.
        for (int s = 0; s < 8; ++s) {
          const Eigen::Index i = s == 0 ? 0 : static_cast<Eigen::Index>(pick() % p->value.size());
          const double num = oracle::CentralDifference([&] { return Loss(model, f, false); }, p->value.data()[i]);
          INFO(p->name << "[" << i << "] analytic " << analytic.data()[i] << " numeric " << num);
          CHECK(oracle::RelativeError(analytic.data()[i], num, 1e-5) < 1e-4);
        }
      }
    }
  }
}

TEST_CASE("frozen parameters stay untouched by backward") {
  Fixture f;
  Seq2SeqModel<double> model(f.config, 2);
  model.ZeroGrad();
  for (auto* p : model.parameters()) {
    if (p->name.find(".struct") != std::string::npos || p->name == "embed_tokens") p->trainable = false;
  }
  Loss(model, f, true);
  for (auto* p : model.parameters()) {
    if (!p->trainable) {
      CHECK(p->grad.isZero());
    }
  }
  CHECK_FALSE(model.parameter("encoder.layers.0.fc1.weight").grad.isZero());
}

TEST_CASE("snapshot and restore") {
  Fixture f;
  Seq2SeqModel<double> model(f.config, 2);
  const auto snap = model.Snapshot();
  const M before = ForwardSeq2Seq(model, f.source, f.dec_ids, f.dec_ann);
  Randomize(model, 1, 0.2);
  model.Restore(snap);
  CHECK(ForwardSeq2Seq(model, f.source, f.dec_ids, f.dec_ann) == before);
  CHECK_THROWS_AS(model.Restore({}), Error);
}

TEST_CASE("checkpoints round trip bit for bit") {
  Fixture f;
  f.config.per_head_bias = true;
  f.config.variant = AttentionVariant::kDistOnly;
  Seq2SeqModel<float> model(f.config, 2);
  Checkpoint ck = MakeCheckpoint(model, f.vocab, 42);
  ck.metadata["task"] = "options";
  const auto dir = testing::ScratchDir("checkpoint");
  SaveCheckpoint(dir / "m.ckpt", ck);
  const Checkpoint back = LoadCheckpoint(dir / "m.ckpt");
  CHECK(back.step == 42);
  CHECK(back.metadata.at("task") == "options");
  CHECK(back.vocab == f.vocab);
  CHECK(back.tensors == ck.tensors);
  CHECK(back.config.ToMap() == f.config.ToMap());

  Seq2SeqModel<float> fresh(back.config, 99);
  LoadParameters(fresh, back);
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    CHECK(fresh.parameters()[i]->value == model.parameters()[i]->value);
  }
  CHECK(ForwardSeq2Seq(fresh, f.source, f.dec_ids, f.dec_ann) ==
        ForwardSeq2Seq(model, f.source, f.dec_ids, f.dec_ann));

  // Save, load and save again gives identical bytes.
  SaveCheckpoint(dir / "again.ckpt", back);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(dir / "m.ckpt") == slurp(dir / "again.ckpt"));
}

TEST_CASE("checkpoint errors") {
  Fixture f;
  Seq2SeqModel<float> model(f.config, 2);
  const auto dir = testing::ScratchDir("checkpoint-errors");
  auto code = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  CHECK(code([&] { LoadCheckpoint(dir / "absent.ckpt"); }) == ErrorCode::kMissingCheckpoint);

  SaveCheckpoint(dir / "m.ckpt", MakeCheckpoint(model, f.vocab, 0));
  std::string bytes;
  {
    std::ifstream in(dir / "m.ckpt", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return dir / name;
  };
  CHECK(code([&] { LoadCheckpoint(write("magic.ckpt", "x" + bytes)); }) == ErrorCode::kMalformedDocument);
  CHECK(code([&] { LoadCheckpoint(write("short.ckpt", bytes.substr(0, bytes.size() - 3))); }) ==
        ErrorCode::kMalformedDocument);
  CHECK(code([&] { LoadCheckpoint(write("long.ckpt", bytes + "zz")); }) == ErrorCode::kMalformedDocument);

  ModelConfig wider = f.config;
  wider.ffn_dim = 32;
  Seq2SeqModel<float> other(wider, 2);
  const Checkpoint ck = LoadCheckpoint(dir / "m.ckpt");
  CHECK(code([&] { LoadParameters(other, ck); }) == ErrorCode::kShapeMismatch);
}
