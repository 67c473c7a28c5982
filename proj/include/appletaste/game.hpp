#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace appletaste {

using Bits = std::vector<std::uint8_t>;

// One prediction per expert (0/1), as seen by the learner in an experts game.
struct Advice {
  Bits votes;
  bool operator==(const Advice&) const = default;
};

// An instance of a finite domain, identified by its column index.
struct Point {
  std::uint32_t id = 0;
  bool operator==(const Point&) const = default;
};

using Instance = std::variant<Advice, Point>;

std::string to_string(const Instance& x);

// Stepwise deterministic learner. The engine calls predict() then observe();
// the label is only passed when the prediction was 1.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual bool accepts(const Instance& x) const = 0;
  virtual bool predict(const Instance& x) = 0;
  virtual void observe(const Instance& x, bool prediction, std::optional<bool> label) = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;
  virtual std::string name() const = 0;
};

struct Certificate {
  std::size_t witness = 0;
  Bits witness_predictions;  // witness's label on every round
};

struct Resolution {
  Bits labels;  // full label sequence, agreeing with every label committed during play
  std::size_t k = 0;
  Certificate certificate;
};

// Stepwise adversary. answer() must return a label when the learner predicted
// 1 and may defer (nullopt) otherwise; finalize() commits everything.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual Instance next(std::size_t t) = 0;
  virtual std::optional<bool> answer(std::size_t t, bool prediction) = 0;
  virtual Resolution finalize(std::size_t horizon) = 0;
  virtual std::string name() const = 0;
};

struct Round {
  std::size_t t = 0;
  Instance instance;
  bool prediction = false;
  std::optional<bool> label;
  bool feedback_visible = false;
};

struct Transcript {
  std::vector<Round> rounds;
  std::size_t horizon = 0;
  std::size_t realizability_k = 0;
  std::optional<Certificate> certificate;
  bool instances_recorded = true;
};

struct MistakeReport {
  std::size_t total = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  bool operator==(const MistakeReport&) const = default;
};

struct GameOptions {
  // Large expert games can skip storing advice vectors; labels, predictions
  // and the certificate are always kept.
  bool record_instances = true;
};

Transcript run_game(Learner& learner, Adversary& adversary, std::size_t horizon,
                    GameOptions options = {});

MistakeReport score(const Transcript& tr);

// True iff the certificate witness disagrees with at most realizability_k
// labels. Where advice was recorded, the witness column must also match it.
bool verify_certificate(const Transcript& tr);

void write_transcript_csv(std::ostream& out, const Transcript& tr);
Transcript read_transcript_csv(std::istream& in);

// Oblivious adversary replaying a fixed labeled sequence.
class SequenceAdversary final : public Adversary {
 public:
  SequenceAdversary(std::vector<Instance> instances, Bits labels, std::size_t k,
                    Certificate certificate);
  Instance next(std::size_t t) override;
  std::optional<bool> answer(std::size_t t, bool prediction) override;
  Resolution finalize(std::size_t horizon) override;
  std::string name() const override { return "sequence"; }

 private:
  std::vector<Instance> instances_;
  Bits labels_;
  std::size_t k_;
  Certificate certificate_;
};

}  // namespace appletaste
