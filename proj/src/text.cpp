#include "tgr/text.hpp"

#include <vector>

namespace tgr {

void TextEncoderSpec::validate() const {
  if (raw_dim < 1) throw ConfigError("encoder raw_dim must be >= 1");
  if (variant == EncoderVariant::HashedNgram) {
    if (ngram_min < 1 || ngram_max < ngram_min) {
      throw ConfigError("encoder n-gram range must satisfy 1 <= min <= max");
    }
  } else if (file_path.empty()) {
    throw ConfigError("precomputed encoder requires a file path");
  }
}

namespace {

// Byte offsets of UTF-8 codepoint starts (continuation bytes are 0b10xxxxxx).
std::vector<std::size_t> codepoint_offsets(const std::string& text) {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      offsets.push_back(i);
    }
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace

Vector encode_text_counts(const TextEncoderSpec& spec,
                          const std::string& text) {
  spec.validate();
  Vector counts = Vector::Zero(spec.raw_dim);
  const std::vector<std::size_t> off = codepoint_offsets(text);
  const std::size_t n_cp = off.size() - 1;
  for (int n = spec.ngram_min; n <= spec.ngram_max; ++n) {
    if (static_cast<std::size_t>(n) > n_cp) break;
    for (std::size_t i = 0; i + n <= n_cp; ++i) {
      std::string_view gram(text.data() + off[i], off[i + n] - off[i]);
      counts[static_cast<Eigen::Index>(
          ngram_bucket(spec.hash_seed, gram, spec.raw_dim))] += 1.0;
    }
  }
  return counts;
}

Vector encode_text(const TextEncoderSpec& spec, const std::string& text) {
  Vector counts = encode_text_counts(spec, text);
  double norm = counts.norm();
  if (norm > 0.0) counts /= norm;
  return counts;
}

TextEncoder::TextEncoder(TextEncoderSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.variant == EncoderVariant::PrecomputedFile) {
    precomputed_ = load_precomputed_embeddings(spec_.file_path);
    if (precomputed_.rows.rows() > 0 && precomputed_.rows.cols() != spec_.raw_dim) {
      throw ConfigError("precomputed embedding width " +
                        std::to_string(precomputed_.rows.cols()) +
                        " does not match raw_dim " +
                        std::to_string(spec_.raw_dim));
    }
  }
}

Vector TextEncoder::encode(const std::string& entity_name,
                           const std::string& text) const {
  if (spec_.variant == EncoderVariant::HashedNgram) {
    return encode_text(spec_, text);
  }
  return precomputed_.lookup(entity_name);
}

}  // namespace tgr
