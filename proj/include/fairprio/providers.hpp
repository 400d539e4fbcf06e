// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fairprio/cassette.hpp"
#include "fairprio/http.hpp"

// Embedding, sentiment and tone providers. Each has a deterministic builtin
// implementation and a remote HTTP+JSON one whose traffic goes through a
// cassette.
namespace fairprio::analyzers {

struct EmbeddingVector {
  Eigen::VectorXd values;
  std::string provider_id;
};

enum class SentimentLabel { positive, negative };
std::string_view to_string(SentimentLabel l) noexcept;

struct SentimentScore {
  double score = 0.0;  // in [-1, 1]
  SentimentLabel label = SentimentLabel::positive;

  /// Label is positive iff score >= 0. Throws ValidationError for scores
  /// outside [-1, 1] or non-finite.
  static SentimentScore from_score(double score);
};

inline constexpr std::array<std::string_view, 7> kEmotions = {
    "anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise"};

using ToneVector = Eigen::Matrix<double, 7, 1>;

/// Probability over kEmotions, in that order.
struct ToneDistribution {
  ToneVector probs = ToneVector::Constant(1.0 / 7.0);

  double operator[](std::string_view emotion) const;
  std::string_view argmax() const;
  /// Validates non-negativity and renormalizes to an exact sum of 1.
  static ToneDistribution from_weights(const ToneVector& weights);
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  virtual std::string id() const = 0;
  virtual SentimentScore sentiment(std::string_view text) const = 0;
};

class ToneProvider {
 public:
  virtual ~ToneProvider() = default;
  virtual std::string id() const = 0;
  virtual ToneDistribution tone(std::string_view text) const = 0;
};

/// Feature-hashed bag of words: each token hashes (64-bit, fixed seed) to an
/// index and a sign; the count vector is L2-normalized.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  static constexpr Eigen::Index kDefaultDimension = 256;
  static constexpr std::uint64_t kDefaultSeed = 0x5EED5EEDULL;

  explicit HashingEmbedder(Eigen::Index dimension = kDefaultDimension,
                           std::uint64_t seed = kDefaultSeed);
  std::string id() const override;
  EmbeddingVector embed(std::string_view text) const override;

 private:
  Eigen::Index dimension_;
  std::uint64_t seed_;
};

/// Signed lexicon: mean valence over matched tokens, with a hit's sign
/// flipped when the token right before it is a negator.
class LexiconSentiment final : public SentimentProvider {
 public:
  /// Shipped valence table.
  LexiconSentiment();
  /// JSON {"negators": [...], "valence": {word: value}}.
  explicit LexiconSentiment(std::string_view json_text);

  std::string id() const override { return "builtin-lexicon"; }
  SentimentScore sentiment(std::string_view text) const override;

  const std::map<std::string, double>& valence() const noexcept { return valence_; }
  const std::set<std::string>& negators() const noexcept { return negators_; }

 private:
  std::map<std::string, double> valence_;
  std::set<std::string> negators_;
};

/// Keyword counts per emotion, plus one for every emotion, normalized.
class KeywordTone final : public ToneProvider {
 public:
  KeywordTone();
  /// JSON {"emotions": {emotion: [keywords]}} covering all seven emotions.
  explicit KeywordTone(std::string_view json_text);

  std::string id() const override { return "builtin-keywords"; }
  ToneDistribution tone(std::string_view text) const override;

  const std::map<std::string, std::size_t>& keywords() const noexcept { return keyword_emotion_; }

 private:
  std::map<std::string, std::size_t> keyword_emotion_;  // keyword -> emotion index
};

struct RemoteEndpoint {
  std::string name;  // part of the cassette key
  std::string url;
  std::string token;  // bearer token, may be empty
  executor::RetryPolicy retry;
};

/// Shared plumbing of the remote providers: POST {"texts": [text]} through
/// the cassette and return the parsed response.
class RemoteClient {
 public:
  RemoteClient(RemoteEndpoint endpoint, std::string kind,
               std::shared_ptr<executor::Cassette> cassette,
               std::shared_ptr<executor::HttpTransport> transport);
  nlohmann::json request(std::string_view text) const;
  const RemoteEndpoint& endpoint() const noexcept { return endpoint_; }

 private:
  RemoteEndpoint endpoint_;
  std::string kind_;
  std::shared_ptr<executor::Cassette> cassette_;
  std::shared_ptr<executor::HttpTransport> transport_;
};

/// Response {"vectors": [[...]]}.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteClient client) : client_(std::move(client)) {}
  std::string id() const override { return "remote:" + client_.endpoint().name; }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  RemoteClient client_;
};

/// Response {"scores": [s]} with s in [-1, 1].
class RemoteSentiment final : public SentimentProvider {
 public:
  explicit RemoteSentiment(RemoteClient client) : client_(std::move(client)) {}
  std::string id() const override { return "remote:" + client_.endpoint().name; }
  SentimentScore sentiment(std::string_view text) const override;

 private:
  RemoteClient client_;
};

/// Response {"distributions": [{emotion: p, ...}]} over the seven emotions.
class RemoteTone final : public ToneProvider {
 public:
  explicit RemoteTone(RemoteClient client) : client_(std::move(client)) {}
  std::string id() const override { return "remote:" + client_.endpoint().name; }
  ToneDistribution tone(std::string_view text) const override;

 private:
  RemoteClient client_;
};

}  // namespace fairprio::analyzers
