#pragma once

// Label classifiers: p(r_j | a_j, b_j, o_j) as nine probabilities.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "mergeweave/align.hpp"
#include "mergeweave/labels.hpp"
#include "mergeweave/process.hpp"

namespace mergeweave {

using LabelProbs = std::array<double, kNumLabels>;

enum class PredictionSource : std::uint8_t { Heuristic, External, Fixed };

struct Prediction {
    LabelProbs probs{};
    PredictionSource source = PredictionSource::Heuristic;
};

inline constexpr double kProbSumTolerance = 1e-6;

inline bool valid_probs(const LabelProbs& p) {
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= kProbSumTolerance;
}

/// Labels by decreasing probability; equal probabilities keep ordinal order.
inline std::vector<ResolutionLabel> ranked_labels(const LabelProbs& p) {
    std::vector<ResolutionLabel> out(kAllLabels.begin(), kAllLabels.end());
    std::stable_sort(out.begin(), out.end(),
                     [&](ResolutionLabel x, ResolutionLabel y) { return p[class_index(x)] > p[class_index(y)]; });
    return out;
}

inline ResolutionLabel argmax_label(const LabelProbs& p) { return ranked_labels(p).front(); }

/// One batch element: a prediction or the reason there is none.
struct PredictionSlot {
    std::optional<Prediction> prediction;
    std::string error;

    bool ok() const { return prediction.has_value(); }
};

class ClassifierError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Classifier {
public:
    virtual ~Classifier() = default;

    /// Throws ClassifierError (or TransportError) when no prediction is made.
    virtual Prediction predict(const ModelInput& input) {
        auto slots = predict_batch(std::span<const ModelInput>(&input, 1));
        if (!slots.front().ok()) throw ClassifierError(slots.front().error);
        return *slots.front().prediction;
    }

    /// Element-wise predict, order preserved. Failures land in their slot.
    virtual std::vector<PredictionSlot> predict_batch(std::span<const ModelInput> inputs) = 0;

    virtual std::string name() const = 0;
};

/// Helper for backends whose batch is just a loop.
class PerItemClassifier : public Classifier {
public:
    std::vector<PredictionSlot> predict_batch(std::span<const ModelInput> inputs) override {
        std::vector<PredictionSlot> out;
        out.reserve(inputs.size());
        for (const auto& in : inputs) out.push_back(predict_one(in));
        return out;
    }

protected:
    virtual PredictionSlot predict_one(const ModelInput& input) = 0;
};

inline LabelProbs unit_mass(ResolutionLabel label) {
    LabelProbs p{};
    p[class_index(label)] = 1.0;
    return p;
}

inline LabelProbs softmax(std::span<const double> scores) {
    LabelProbs p{};
    const double hi = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (std::size_t k = 0; k < kNumLabels; ++k) z += p[k] = std::exp(scores[k] - hi);
    for (auto& v : p) v /= z;
    return p;
}

// ---------------------------------------------------------------------------
// Heuristic baseline

/// Label frequencies of the mined training split (add-one smoothed), TakeA
/// first. Regenerate with `mergeweave stats --prior`.
inline constexpr LabelProbs kDefaultLabelPrior = {58.0 / 136, 52.0 / 136, 1.0 / 136, 12.0 / 136, 2.0 / 136,
                                                  3.0 / 136,  3.0 / 136,  1.0 / 136, 4.0 / 136};

struct HeuristicWeights {
    double empty_output = -4.0;    // label yields nothing although a side has content
    double unchanged_side = 3.0;   // a == o favours TakeB, b == o favours TakeA
    double containment = 1.5;      // token set of one side covers the other
    LabelProbs prior = kDefaultLabelPrior;
};

namespace detail {

inline std::set<std::string> token_set(const TokenStream& s) {
    std::set<std::string> out;
    for (const auto& t : s)
        if (!is_layout(t)) out.insert(t.text);
    return out;
}

inline bool blank(const TokenStream& s) { return normalize_whitespace(detokenize(s)).empty(); }

}  // namespace detail

/// Unnormalized log-scores; the heuristic prediction is their softmax.
inline LabelProbs heuristic_scores(const TokenStream& a, const TokenStream& b, const TokenStream& o,
                                   const HeuristicWeights& w = {}) {
    LabelProbs s{};
    for (std::size_t k = 0; k < kNumLabels; ++k) s[k] = std::log(std::max(w.prior[k], 1e-12));

    const bool a_blank = detail::blank(a), b_blank = detail::blank(b);
    if (!a_blank || !b_blank) {
        for (auto label : kAllLabels)
            if (detail::blank(apply_label(label, a, b, o))) s[class_index(label)] += w.empty_output;
    }

    const bool a_is_o = same_resolution(a, o), b_is_o = same_resolution(b, o);
    if (a_is_o && !b_is_o) s[class_index(ResolutionLabel::TakeB)] += w.unchanged_side;
    if (b_is_o && !a_is_o) s[class_index(ResolutionLabel::TakeA)] += w.unchanged_side;

    const auto ta = detail::token_set(a), tb = detail::token_set(b);
    if (!ta.empty() && std::includes(ta.begin(), ta.end(), tb.begin(), tb.end()))
        s[class_index(ResolutionLabel::TakeA)] += w.containment;
    if (!tb.empty() && std::includes(tb.begin(), tb.end(), ta.begin(), ta.end()))
        s[class_index(ResolutionLabel::TakeB)] += w.containment;
    return s;
}

class HeuristicClassifier : public PerItemClassifier {
public:
    explicit HeuristicClassifier(HeuristicWeights w = {}) : w_(w) {}
    std::string name() const override { return "heuristic"; }

protected:
    PredictionSlot predict_one(const ModelInput& in) override {
        auto s = heuristic_scores(in.a, in.b, in.o, w_);
        return {Prediction{softmax(s), PredictionSource::Heuristic}, {}};
    }

private:
    HeuristicWeights w_;
};

// ---------------------------------------------------------------------------
// Test doubles and evaluation bounds

/// Unit mass on the reference label carried by the input.
class OracleClassifier : public PerItemClassifier {
public:
    std::string name() const override { return "oracle"; }

protected:
    PredictionSlot predict_one(const ModelInput& in) override {
        if (!in.reference_label) return {std::nullopt, "no reference label"};
        return {Prediction{unit_mass(*in.reference_label), PredictionSource::Fixed}, {}};
    }
};

class FixedClassifier : public PerItemClassifier {
public:
    explicit FixedClassifier(LabelProbs p) : p_(p) {
        if (!valid_probs(p_)) throw std::invalid_argument("fixed distribution is not a probability vector");
    }
    explicit FixedClassifier(ResolutionLabel label) : FixedClassifier(unit_mass(label)) {}
    std::string name() const override { return "fixed"; }

protected:
    PredictionSlot predict_one(const ModelInput&) override { return {Prediction{p_, PredictionSource::Fixed}, {}}; }

private:
    LabelProbs p_;
};

/// Never predicts.
class AbstainClassifier : public PerItemClassifier {
public:
    std::string name() const override { return "abstain"; }

protected:
    PredictionSlot predict_one(const ModelInput&) override { return {std::nullopt, "abstain"}; }
};

class FunctionClassifier : public PerItemClassifier {
public:
    explicit FunctionClassifier(std::function<LabelProbs(const ModelInput&)> fn) : fn_(std::move(fn)) {}
    std::string name() const override { return "function"; }

protected:
    PredictionSlot predict_one(const ModelInput& in) override {
        return {Prediction{fn_(in), PredictionSource::Fixed}, {}};
    }

private:
    std::function<LabelProbs(const ModelInput&)> fn_;
};

// ---------------------------------------------------------------------------
// Wire protocol

inline nlohmann::ordered_json prediction_response_json(long long id, const LabelProbs& p) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["probs"] = p;
    return j;
}

inline nlohmann::ordered_json error_response_json(std::optional<long long> id, const std::string& message) {
    nlohmann::ordered_json j;
    if (id)
        j["id"] = *id;
    else
        j["id"] = nullptr;
    j["error"] = message;
    return j;
}

/// Parsed reply: id plus either probabilities or an error message.
struct WireReply {
    std::optional<long long> id;
    std::optional<LabelProbs> probs;
    std::string error;
};

inline WireReply parse_reply(std::string_view line) {
    WireReply r;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        r.error = "malformed reply";
        return r;
    }
    if (j.contains("id") && j["id"].is_number_integer()) r.id = j["id"].get<long long>();
    if (j.contains("error")) {
        r.error = j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
        return r;
    }
    if (!j.contains("probs") || !j["probs"].is_array() || j["probs"].size() != kNumLabels) {
        r.error = "reply has no 9-element probs";
        return r;
    }
    LabelProbs p{};
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        if (!j["probs"][k].is_number()) {
            r.error = "non-numeric probability";
            return r;
        }
        p[k] = j["probs"][k].get<double>();
    }
    if (!valid_probs(p)) {
        r.error = "probabilities do not form a distribution";
        return r;
    }
    r.probs = p;
    return r;
}

inline constexpr std::chrono::milliseconds kDefaultScorerTimeout{10000};

/// Client for an external scorer speaking line-delimited JSON over a child
/// process's stdio or a TCP connection. Requests of one batch are pipelined and
/// replies are matched by id, in any order.
class ExternalClassifier : public Classifier {
public:
    static std::unique_ptr<ExternalClassifier> spawn(const std::vector<std::string>& argv,
                                                     std::chrono::milliseconds timeout = kDefaultScorerTimeout) {
        ignore_sigpipe();
        auto c = std::unique_ptr<ExternalClassifier>(new ExternalClassifier(timeout));
        c->child_ = ChildProcess(argv);
        detail::set_nonblocking(c->child_.stdin_fd());
        c->channel_.emplace(c->child_.stdout_fd(), c->child_.stdin_fd());
        c->endpoint_ = argv.front();
        return c;
    }

    static std::unique_ptr<ExternalClassifier> connect(const std::string& host, const std::string& port,
                                                       std::chrono::milliseconds timeout = kDefaultScorerTimeout) {
        ignore_sigpipe();
        auto c = std::unique_ptr<ExternalClassifier>(new ExternalClassifier(timeout));
        c->socket_ = tcp_connect(host, port);
        detail::set_nonblocking(c->socket_.get());
        c->channel_.emplace(c->socket_.get(), c->socket_.get());
        c->endpoint_ = host + ":" + port;
        return c;
    }

    std::string name() const override { return "external(" + endpoint_ + ")"; }

    Prediction predict(const ModelInput& input) override {
        auto slots = predict_batch(std::span<const ModelInput>(&input, 1));
        if (!slots.front().ok()) {
            if (broken_) throw TransportError(slots.front().error);
            throw ClassifierError(slots.front().error);
        }
        return *slots.front().prediction;
    }

    std::vector<PredictionSlot> predict_batch(std::span<const ModelInput> inputs) override {
        std::lock_guard lock(mu_);
        std::vector<PredictionSlot> out(inputs.size());
        if (broken_) {
            for (auto& s : out) s.error = "transport: " + broken_reason_;
            return out;
        }
        std::map<long long, std::size_t> pending;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const long long id = next_id_++;
            pending[id] = k;
            channel_->queue(model_input_to_json(inputs[k], id).dump());
        }
        try {
            while (!pending.empty()) {
                auto line = channel_->pump_until_line(timeout_);
                if (!line) throw TransportError("scorer closed the stream");
                auto reply = parse_reply(*line);
                if (!reply.id) {
                    spdlog::warn("scorer reply without id ignored: {}", reply.error);
                    continue;
                }
                auto it = pending.find(*reply.id);
                if (it == pending.end()) {
                    spdlog::warn("scorer reply for unknown id {}", *reply.id);
                    continue;
                }
                auto& slot = out[it->second];
                if (reply.probs)
                    slot.prediction = Prediction{*reply.probs, PredictionSource::External};
                else
                    slot.error = reply.error;
                pending.erase(it);
            }
        } catch (const TransportError& e) {
            broken_ = true;
            broken_reason_ = e.what();
            spdlog::error("scorer {}: {}", endpoint_, e.what());
            for (auto& [id, k] : pending) out[k].error = std::string("transport: ") + e.what();
        }
        return out;
    }

    bool broken() const { return broken_; }

private:
    explicit ExternalClassifier(std::chrono::milliseconds timeout) : timeout_(timeout) {}

    std::mutex mu_;
    std::chrono::milliseconds timeout_;
    ChildProcess child_;
    Fd socket_;
    std::optional<LineChannel> channel_;
    std::string endpoint_;
    long long next_id_ = 0;
    bool broken_ = false;
    std::string broken_reason_;
};

/// Falls back to a second classifier for slots the first could not fill
/// because of a transport failure.
class FallbackClassifier : public Classifier {
public:
    FallbackClassifier(std::unique_ptr<Classifier> primary, std::unique_ptr<Classifier> fallback)
        : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

    std::string name() const override { return primary_->name() + "|" + fallback_->name(); }

    std::vector<PredictionSlot> predict_batch(std::span<const ModelInput> inputs) override {
        auto out = primary_->predict_batch(inputs);
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (out[k].ok() || out[k].error.rfind("transport:", 0) != 0) continue;
            auto alt = fallback_->predict_batch(inputs.subspan(k, 1));
            out[k] = std::move(alt.front());
        }
        return out;
    }

private:
    std::unique_ptr<Classifier> primary_;
    std::unique_ptr<Classifier> fallback_;
};

}  // namespace mergeweave
