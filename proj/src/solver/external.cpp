#include <algorithm>
#include <cctype>
#include <sstream>

#include "cscv/error.hpp"
#include "cscv/solver/solver.hpp"
#include "cscv/solver/subprocess.hpp"

namespace cscv::solver {

namespace {

struct SExpr {
  bool atom = true;
  std::string text;
  std::vector<SExpr> items;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  bool next(SExpr& out) {
    skip();
    if (i_ >= s_.size()) return false;
    out = read();
    return true;
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        ++i_;
      } else if (s_[i_] == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    if (s_[i_] == '(') {
      ++i_;
      e.atom = false;
      while (true) {
        skip();
        if (i_ >= s_.size()) break;
        if (s_[i_] == ')') {
          ++i_;
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (s_[i_] == ')') {  // stray closer
      ++i_;
      e.text = ")";
      return e;
    }
    if (s_[i_] == '"') {
      std::size_t j = i_ + 1;
      while (j < s_.size()) {
        if (s_[j] == '"') {
          if (j + 1 < s_.size() && s_[j + 1] == '"') {
            j += 2;
            continue;
          }
          break;
        }
        ++j;
      }
      e.text = s_.substr(i_, j + 1 - i_);
      i_ = std::min(j + 1, s_.size());
      return e;
    }
    if (s_[i_] == '|') {
      std::size_t j = s_.find('|', i_ + 1);
      if (j == std::string::npos) j = s_.size();
      e.text = s_.substr(i_ + 1, j - i_ - 1);
      i_ = std::min(j + 1, s_.size());
      return e;
    }
    std::size_t j = i_;
    while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != '(' &&
           s_[j] != ')' && s_[j] != ';') {
      ++j;
    }
    e.text = s_.substr(i_, j - i_);
    i_ = j;
    return e;
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

bool is_error(const SExpr& e) {
  return !e.atom && !e.items.empty() && e.items[0].atom && e.items[0].text == "error";
}

std::optional<Int> int_literal(const SExpr& e) {
  if (e.atom) {
    if (e.text.empty() || !std::all_of(e.text.begin(), e.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return std::nullopt;
    }
    return Int(e.text);
  }
  if (e.items.size() == 2 && e.items[0].atom && e.items[0].text == "-") {
    if (auto v = int_literal(e.items[1])) return Int(-*v);
  }
  return std::nullopt;
}

// Reads (model (define-fun x () Int 3) ...) or ((define-fun x () Int 3) ...).
std::optional<Model> read_model(const SExpr& e, const SmtQuery& q, std::string& why) {
  if (e.atom) {
    why = "expected a model, got " + e.text;
    return std::nullopt;
  }
  std::map<std::string, const SExpr*> defs;
  for (const auto& item : e.items) {
    if (item.atom) continue;  // the `model` keyword
    if (item.items.size() != 5 || item.items[0].text != "define-fun") continue;
    defs[item.items[1].text] = &item.items[4];
  }
  Model m;
  for (const auto& [name, sort] : q.symbols) {
    auto it = defs.find(name);
    if (sort == Sort::Bool) {
      // Solvers may drop symbols the model does not constrain.
      bool v = it != defs.end() && it->second->atom && it->second->text == "true";
      m.emplace(name, v);
      continue;
    }
    Int v = 0;
    if (it != defs.end()) {
      auto lit = int_literal(*it->second);
      if (!lit) {
        why = "unreadable value for " + name;
        return std::nullopt;
      }
      v = *lit;
    }
    if (sort == Sort::Address) {
      if (v < 0 || v >= Int(q.address_table.size())) {
        why = "address index out of range for " + name;
        return std::nullopt;
      }
      m.emplace(name, q.address_table[static_cast<std::size_t>(v)]);
    } else {
      m.emplace(name, v);
    }
  }
  return m;
}

}  // namespace

std::vector<SolverResult> parse_responses(const std::string& output, const std::vector<SmtQuery>& queries) {
  std::vector<SolverResult> results;
  Reader reader(output);
  SExpr e;
  std::string last_error;
  bool pending = false;  // a status has been read but not consumed
  SExpr status;
  while (results.size() < queries.size()) {
    if (!pending) {
      if (!reader.next(e)) break;
      if (is_error(e)) {
        last_error = e.items.size() > 1 ? e.items[1].text : "error";
        continue;
      }
      if (!e.atom || (e.text != "sat" && e.text != "unsat" && e.text != "unknown")) continue;
      status = e;
    }
    pending = false;
    const SmtQuery& q = queries[results.size()];
    if (status.text == "unsat") {
      results.push_back({Status::Unsat, {}, {}});
    } else if (status.text == "unknown") {
      results.push_back({Status::Unknown, {}, "backend answered unknown"});
    } else {
      SolverResult r{Status::Unknown, {}, {}};
      if (!reader.next(e)) {
        r.detail = "missing model";
      } else if (e.atom && (e.text == "sat" || e.text == "unsat" || e.text == "unknown")) {
        r.detail = "missing model";
        status = e;
        pending = true;
      } else if (is_error(e)) {
        r.detail = "model error: " + (e.items.size() > 1 ? e.items[1].text : std::string());
      } else {
        std::string why;
        if (auto m = read_model(e, q, why)) {
          r.status = Status::Sat;
          r.model = std::move(*m);
        } else {
          r.detail = why;
        }
      }
      results.push_back(std::move(r));
    }
  }
  while (results.size() < queries.size()) {
    results.push_back({Status::Unknown, {}, last_error.empty() ? "no response" : last_error});
  }
  return results;
}

namespace {

void check_started(const ProcessResult& p, const std::string& command) {
  if (!p.started || (p.exit_code == 127 && p.out.empty())) {
    throw Error(ErrorKind::BackendUnavailable, "cannot start solver process", command);
  }
}

// Drop models that do not check out against the original terms.
void validate(SolverResult& r, const std::vector<TermPtr>& terms) {
  if (r.status == Status::Sat && !satisfies(terms, r.model)) {
    r = {Status::Unknown, {}, "backend model does not satisfy the query"};
  }
}

}  // namespace

ExternalSolver::ExternalSolver(std::string command, std::chrono::milliseconds timeout, bool persistent)
    : command_(std::move(command)), timeout_(timeout), persistent_(persistent) {}

ExternalSolver::~ExternalSolver() = default;

SolverResult ExternalSolver::solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) {
  SmtQuery q = lower_query(terms, domain);
  if (persistent_) {
    static const std::string marker = "@@cscv-done";
    if (!session_) session_ = std::make_unique<Session>(command_);
    std::string script;
    if (!session_->running()) script = "(set-option :produce-models true)\n(set-logic QF_NIA)\n";
    script += "(push 1)\n" + q.body + "(check-sat)\n(get-model)\n(pop 1)\n(echo \"" + marker + "\")\n";
    SessionReply reply = session_->exchange(script, marker, timeout_);
    if (!reply.started || (!reply.complete && reply.exit_code == 127 && reply.out.empty())) {
      throw Error(ErrorKind::BackendUnavailable, "cannot start solver process", command_);
    }
    if (reply.timed_out) return {Status::Unknown, {}, "timeout"};
    auto results = parse_responses(reply.out, {q});
    validate(results[0], terms);
    return results[0];
  }
  std::string script = "(set-option :produce-models true)\n(set-logic QF_NIA)\n" + q.body +
                       "(check-sat)\n(get-model)\n(exit)\n";
  ProcessResult p = run_process(command_, script, timeout_);
  check_started(p, command_);
  if (p.timed_out) return {Status::Unknown, {}, "timeout"};
  auto results = parse_responses(p.out, {q});
  validate(results[0], terms);
  return results[0];
}

std::vector<SolverResult> ExternalSolver::solve_batch(const std::vector<std::vector<TermPtr>>& queries,
                                                      const AddressDomain& domain) {
  std::vector<SmtQuery> lowered;
  std::ostringstream script;
  script << "(set-option :produce-models true)\n(set-logic QF_NIA)\n";
  for (const auto& terms : queries) {
    lowered.push_back(lower_query(terms, domain));
    script << "(push 1)\n" << lowered.back().body << "(check-sat)\n(get-model)\n(pop 1)\n";
  }
  script << "(exit)\n";
  auto scaled = timeout_ * static_cast<long>(std::max<std::size_t>(1, queries.size()));
  ProcessResult p = run_process(command_, script.str(), scaled);
  check_started(p, command_);
  auto results = parse_responses(p.out, lowered);
  for (std::size_t i = 0; i < results.size(); ++i) validate(results[i], queries[i]);
  return results;
}

}  // namespace cscv::solver
