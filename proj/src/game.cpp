#include "appletaste/game.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "appletaste/errors.hpp"

namespace appletaste {

std::string to_string(const Instance& x) {
  if (const auto* a = std::get_if<Advice>(&x)) {
    std::string s(a->votes.size(), '0');
    for (std::size_t j = 0; j < a->votes.size(); ++j)
      if (a->votes[j]) s[j] = '1';
    return s;
  }
  return "x" + std::to_string(std::get<Point>(x).id);
}

Transcript run_game(Learner& learner, Adversary& adversary, std::size_t horizon,
                    GameOptions options) {
  if (horizon < 1) throw ParameterError("run_game: horizon must be >= 1");

  Transcript tr;
  tr.horizon = horizon;
  tr.instances_recorded = options.record_instances;
  tr.rounds.reserve(horizon);

  for (std::size_t t = 1; t <= horizon; ++t) {
    Instance x = adversary.next(t);
    if (!learner.accepts(x))
      throw DomainError(adversary.name() + " emitted instance outside " + learner.name() +
                        "'s domain at round " + std::to_string(t));
    const bool yhat = learner.predict(x);
    std::optional<bool> y = adversary.answer(t, yhat);
    if (yhat && !y)
      throw ProtocolError(adversary.name() + " withheld the label of a 1-prediction at round " +
                          std::to_string(t));
    learner.observe(x, yhat, yhat ? y : std::nullopt);

    Round r;
    r.t = t;
    r.prediction = yhat;
    r.label = y;
    r.feedback_visible = yhat;
    if (options.record_instances) r.instance = std::move(x);
    tr.rounds.push_back(std::move(r));
  }

  Resolution res = adversary.finalize(horizon);
  if (res.labels.size() != horizon)
    throw ProtocolError(adversary.name() + " did not commit a label for every round");
  for (std::size_t i = 0; i < horizon; ++i) {
    auto& r = tr.rounds[i];
    const bool committed = res.labels[i] != 0;
    if (r.label && *r.label != committed)
      throw ProtocolError(adversary.name() + " changed a committed label at round " +
                          std::to_string(i + 1));
    r.label = committed;
  }
  if (res.certificate.witness_predictions.size() != horizon)
    throw ProtocolError(adversary.name() + " produced a certificate of the wrong length");
  tr.realizability_k = res.k;
  tr.certificate = std::move(res.certificate);
  return tr;
}

MistakeReport score(const Transcript& tr) {
  MistakeReport m;
  for (const auto& r : tr.rounds) {
    if (!r.label) throw ProtocolError("score: round " + std::to_string(r.t) + " has no label");
    if (r.prediction && !*r.label) ++m.false_positives;
    if (!r.prediction && *r.label) ++m.false_negatives;
  }
  m.total = m.false_positives + m.false_negatives;
  return m;
}

bool verify_certificate(const Transcript& tr) {
  if (!tr.certificate) throw ProtocolError("verify_certificate: transcript has no certificate");
  const auto& c = *tr.certificate;
  if (c.witness_predictions.size() != tr.rounds.size()) return false;
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
    const auto& r = tr.rounds[i];
    if (!r.label) throw ProtocolError("verify_certificate: deferred label present");
    const bool w = c.witness_predictions[i] != 0;
    if (tr.instances_recorded) {
      if (const auto* a = std::get_if<Advice>(&r.instance)) {
        if (c.witness >= a->votes.size() || (a->votes[c.witness] != 0) != w) return false;
      }
    }
    if (w != *r.label) ++disagreements;
  }
  return disagreements <= tr.realizability_k;
}

void write_transcript_csv(std::ostream& out, const Transcript& tr) {
  out << "t,instance,yhat,y,feedback_visible\n";
  for (const auto& r : tr.rounds) {
    out << r.t << ',' << (tr.instances_recorded ? to_string(r.instance) : std::string()) << ','
        << int(r.prediction) << ',';
    if (r.label) out << int(*r.label);
    out << ',' << int(r.feedback_visible) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_bit(const std::string& s, std::size_t line_no) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw ParseError("transcript line " + std::to_string(line_no) + ": expected 0/1, got '" + s + "'");
}

std::size_t parse_count(const std::string& s, std::size_t line_no) {
  if (s.empty() || s.size() > 18 || s.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("transcript line " + std::to_string(line_no) + ": expected a count, got '" + s + "'");
  return std::stoull(s);
}

}  // namespace

Transcript read_transcript_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,instance,yhat,y,feedback_visible")
    throw ParseError("transcript: missing header");
  Transcript tr;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw ParseError("transcript line " + std::to_string(line_no) + ": expected 5 columns");
    Round r;
    r.t = parse_count(cells[0], line_no);
    const std::string& inst = cells[1];
    if (inst.empty()) {
      tr.instances_recorded = false;
    } else if (inst.front() == 'x') {
      r.instance = Point{static_cast<std::uint32_t>(parse_count(inst.substr(1), line_no))};
    } else if (inst.find_first_not_of("01") == std::string::npos) {
      Advice a;
      a.votes.reserve(inst.size());
      for (char ch : inst) a.votes.push_back(ch == '1');
      r.instance = std::move(a);
    } else {
      throw ParseError("transcript line " + std::to_string(line_no) + ": bad instance '" + inst + "'");
    }
    r.prediction = parse_bit(cells[2], line_no);
    if (!cells[3].empty()) r.label = parse_bit(cells[3], line_no);
    r.feedback_visible = parse_bit(cells[4], line_no);
    if (r.feedback_visible != r.prediction)
      throw ParseError("transcript line " + std::to_string(line_no) + ": feedback_visible must equal yhat");
    tr.rounds.push_back(std::move(r));
  }
  tr.horizon = tr.rounds.size();
  return tr;
}

SequenceAdversary::SequenceAdversary(std::vector<Instance> instances, Bits labels, std::size_t k,
                                     Certificate certificate)
    : instances_(std::move(instances)),
      labels_(std::move(labels)),
      k_(k),
      certificate_(std::move(certificate)) {
  if (instances_.size() != labels_.size())
    throw ParameterError("SequenceAdversary: instances and labels differ in length");
}

Instance SequenceAdversary::next(std::size_t t) {
  if (t == 0 || t > instances_.size()) throw ProtocolError("SequenceAdversary: sequence exhausted");
  return instances_[t - 1];
}

std::optional<bool> SequenceAdversary::answer(std::size_t t, bool) { return labels_[t - 1] != 0; }

Resolution SequenceAdversary::finalize(std::size_t horizon) {
  Resolution r;
  r.labels.assign(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(horizon));
  r.k = k_;
  r.certificate = certificate_;
  r.certificate.witness_predictions.resize(horizon);
  return r;
}

}  // namespace appletaste
