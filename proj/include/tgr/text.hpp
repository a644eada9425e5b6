#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "tgr/common.hpp"
#include "tgr/io.hpp"

namespace tgr {

enum class EncoderVariant { HashedNgram, PrecomputedFile };

struct TextEncoderSpec {
  EncoderVariant variant = EncoderVariant::HashedNgram;
  int raw_dim = 4096;
  int ngram_min = 1;
  int ngram_max = 3;
  std::uint64_t hash_seed = 0;
  std::string file_path;  // precomputed variant only

  void validate() const;
};

/// Bucket hash used by the hashed n-gram encoder: FNV-1a 64 over the n-gram
/// bytes with the seed XORed into the offset basis, then the SplitMix64
/// finalizer. Bucket index is the hash modulo raw_dim.
inline std::uint64_t ngram_bucket(std::uint64_t hash_seed,
                                  std::string_view ngram, int raw_dim) {
  return splitmix64(fnv1a64(ngram, hash_seed)) %
         static_cast<std::uint64_t>(raw_dim);
}

/// Raw bucket counts of UTF-8 character n-grams (codepoint windows, hashed at
/// the byte level). Sum of counts equals the number of n-grams in the text.
Vector encode_text_counts(const TextEncoderSpec& spec, const std::string& text);

/// L2-normalized bucket counts; the zero text maps to the zero vector.
/// Pure function of (spec, text).
Vector encode_text(const TextEncoderSpec& spec, const std::string& text);

/// Uniform encoder front-end for both variants. Precomputed lookups are keyed
/// by entity name and raise DataError naming the entity when absent.
class TextEncoder {
 public:
  explicit TextEncoder(TextEncoderSpec spec);

  const TextEncoderSpec& spec() const { return spec_; }
  int raw_dim() const { return spec_.raw_dim; }

  Vector encode(const std::string& entity_name, const std::string& text) const;

 private:
  TextEncoderSpec spec_;
  PrecomputedEmbeddings precomputed_;
};

}  // namespace tgr
