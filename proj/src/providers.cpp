// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/providers.hpp"

#include <algorithm>
#include <cmath>

#include "fairprio/analyzers.hpp"
#include "fairprio/embedded.hpp"
#include "fairprio/error.hpp"
#include "fairprio/text.hpp"

namespace fairprio::analyzers {

namespace {

nlohmann::json parse_table(std::string_view json_text, std::string_view what) {
  try {
    return nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what(), 0);
  }
}

std::size_t emotion_index(std::string_view emotion) {
  const auto it = std::find(kEmotions.begin(), kEmotions.end(), emotion);
  if (it == kEmotions.end()) throw ValidationError("unknown emotion " + std::string(emotion));
  return static_cast<std::size_t>(it - kEmotions.begin());
}

}  // namespace

std::string_view to_string(SentimentLabel l) noexcept {
  return l == SentimentLabel::positive ? "positive" : "negative";
}

SentimentScore SentimentScore::from_score(double score) {
  if (!std::isfinite(score) || score < -1.0 || score > 1.0) {
    throw ValidationError("sentiment score " + std::to_string(score) + " outside [-1, 1]");
  }
  return {score, score >= 0.0 ? SentimentLabel::positive : SentimentLabel::negative};
}

double ToneDistribution::operator[](std::string_view emotion) const {
  return probs[static_cast<Eigen::Index>(emotion_index(emotion))];
}

std::string_view ToneDistribution::argmax() const {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return kEmotions[static_cast<std::size_t>(best)];
}

ToneDistribution ToneDistribution::from_weights(const ToneVector& weights) {
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw ValidationError("tone weights must be finite and non-negative");
  }
  const double sum = weights.sum();
  if (sum <= 0.0) throw ValidationError("tone weights sum to zero");
  ToneDistribution d;
  d.probs = weights / sum;
  return d;
}

// --- builtin embedding ----------------------------------------------------

HashingEmbedder::HashingEmbedder(Eigen::Index dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ <= 0) throw ValidationError("embedding dimension must be positive");
}

std::string HashingEmbedder::id() const {
  return "builtin-hashing-" + std::to_string(dimension_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view s) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension_);
  for (const auto& token : tokenize(s)) {
    const std::uint64_t h = text::hash64(token, seed_);
    const auto idx = static_cast<Eigen::Index>((h & 0x7FFFFFFFFFFFFFFFULL) %
                                               static_cast<std::uint64_t>(dimension_));
    v[idx] += (h >> 63) ? -1.0 : 1.0;
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return {std::move(v), id()};
}

// --- builtin sentiment ----------------------------------------------------

LexiconSentiment::LexiconSentiment()
    : LexiconSentiment(detail::embedded_file("valence.json")) {}

LexiconSentiment::LexiconSentiment(std::string_view json_text) {
  const auto doc = parse_table(json_text, "valence table");
  try {
    for (const auto& [word, value] : doc.at("valence").items()) {
      const double v = value.get<double>();
      if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
        throw ValidationError("valence of '" + word + "' outside [-1, 1]");
      }
      valence_[text::casefold(word)] = v;
    }
    for (const auto& n : doc.value("negators", nlohmann::json::array())) {
      negators_.insert(text::casefold(n.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("valence table: ") + e.what());
  }
}

SentimentScore LexiconSentiment::sentiment(std::string_view s) const {
  const TokenList tokens = tokenize(s);
  double total = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = valence_.find(tokens[i]);
    if (it == valence_.end()) continue;
    double v = it->second;
    if (i > 0 && negators_.count(tokens[i - 1]) != 0) v = -v;
    total += v;
    ++hits;
  }
  return SentimentScore::from_score(total / static_cast<double>(std::max<std::size_t>(1, hits)));
}

// --- builtin tone ---------------------------------------------------------

KeywordTone::KeywordTone() : KeywordTone(detail::embedded_file("emotions.json")) {}

KeywordTone::KeywordTone(std::string_view json_text) {
  const auto doc = parse_table(json_text, "emotion table");
  try {
    const auto& emotions = doc.at("emotions");
    for (const auto emotion : kEmotions) {
      const std::size_t idx = emotion_index(emotion);
      for (const auto& w : emotions.at(std::string(emotion))) {
        const std::string word = text::casefold(w.get<std::string>());
        if (!keyword_emotion_.emplace(word, idx).second) {
          throw ValidationError("emotion keyword '" + word + "' listed twice");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("emotion table: ") + e.what());
  }
}

ToneDistribution KeywordTone::tone(std::string_view s) const {
  ToneVector counts = ToneVector::Ones();
  for (const auto& token : tokenize(s)) {
    const auto it = keyword_emotion_.find(token);
    if (it != keyword_emotion_.end()) counts[static_cast<Eigen::Index>(it->second)] += 1.0;
  }
  return ToneDistribution::from_weights(counts);
}

// --- remote providers -----------------------------------------------------

RemoteClient::RemoteClient(RemoteEndpoint endpoint, std::string kind,
                           std::shared_ptr<executor::Cassette> cassette,
                           std::shared_ptr<executor::HttpTransport> transport)
    : endpoint_(std::move(endpoint)),
      kind_(std::move(kind)),
      cassette_(std::move(cassette)),
      transport_(std::move(transport)) {
  if (!cassette_) throw ValidationError("remote provider needs a cassette");
}

nlohmann::json RemoteClient::request(std::string_view s) const {
  const nlohmann::json body = {{"texts", nlohmann::json::array({std::string(s)})}};
  const nlohmann::json key = {{"kind", kind_}, {"provider", endpoint_.name}, {"body", body}};
  const std::string raw = cassette_->fetch(key, [&] {
    if (!transport_) throw TransportError("no HTTP transport configured");
    executor::HeaderList headers;
    if (!endpoint_.token.empty()) headers.emplace_back("Authorization", "Bearer " + endpoint_.token);
    return executor::post_with_retry(*transport_, endpoint_.url, body.dump(), headers,
                                     endpoint_.retry);
  });
  try {
    return nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(kind_ + " provider " + endpoint_.name + " returned invalid JSON: " +
                         e.what());
  }
}

EmbeddingVector RemoteEmbedder::embed(std::string_view s) const {
  const auto res = client_.request(s);
  try {
    const auto& vec = res.at("vectors").at(0);
    Eigen::VectorXd v(static_cast<Eigen::Index>(vec.size()));
    for (std::size_t i = 0; i < vec.size(); ++i) v[static_cast<Eigen::Index>(i)] = vec[i].get<double>();
    if (v.size() == 0 || !v.allFinite()) throw TransportError("embedding is empty or non-finite");
    return {std::move(v), id()};
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed embedding response: " + std::string(e.what()));
  }
}

SentimentScore RemoteSentiment::sentiment(std::string_view s) const {
  const auto res = client_.request(s);
  double score = 0.0;
  try {
    score = res.at("scores").at(0).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed sentiment response: " + std::string(e.what()));
  }
  return SentimentScore::from_score(score);
}

ToneDistribution RemoteTone::tone(std::string_view s) const {
  const auto res = client_.request(s);
  ToneVector w;
  try {
    const auto& d = res.at("distributions").at(0);
    for (std::size_t i = 0; i < kEmotions.size(); ++i) {
      w[static_cast<Eigen::Index>(i)] = d.at(std::string(kEmotions[i])).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed tone response: " + std::string(e.what()));
  }
  return ToneDistribution::from_weights(w);
}

}  // namespace fairprio::analyzers
