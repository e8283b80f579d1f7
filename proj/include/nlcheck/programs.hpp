#pragma once

// The client programs, compiled by hand into copyable step machines. Each
// machine performs one atomic object step per step() call; the pre-state
// snapshot a call's checkers need is taken inside the call's first step.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlcheck/explorer.hpp"

namespace nlcheck {

// One exchange(v) call over World::exchanger.
struct ExchangeCallMachine {
  int view = 0;
  Value given = 0;
  int yields_total = 1;

  // machine state
  int pc = 0;
  OfferId offer = kNullOffer;
  OfferId cur = kNullOffer;
  Hole seen;
  int yields_left = 0;
  ExchangeCallRecord record;
  bool call_done = false;
  std::optional<Value> result;

  ExchangeCallMachine() = default;
  ExchangeCallMachine(int view_, Value v, int yields)
      : view(view_), given(v), yields_total(yields) {}

  StepRecord step(World& w, ExecutionSink& sink);
  bool in_call() const { return pc > 0 && !call_done; }
  void check_in_flight(const World& w, ExecutionSink& sink) const;

 private:
  void finish(std::optional<Value> r, const World& w, ExecutionSink& sink);
};

// One flip2(x) call over World::flip.
struct Flip2CallMachine {
  int view = 0;
  int pc = 0;
  Flip2CallRecord record;
  bool call_done = false;
  int result = -1;

  Flip2CallMachine() = default;
  explicit Flip2CallMachine(int view_) : view(view_) {}

  StepRecord step(World& w, ExecutionSink& sink);
};

// One getAndInc() call over World::network.
struct IncCallMachine {
  int view = 0;
  int pc = 0;
  Token token;
  IncCallRecord record;
  bool call_done = false;
  std::int64_t result = -1;

  IncCallMachine() = default;
  explicit IncCallMachine(int view_) : view(view_) {}

  StepRecord step(World& w, ExecutionSink& sink);
  bool in_call() const { return pc > 0 && !call_done; }
  void check_in_flight(const World& w, ExecutionSink& sink) const;
};

// --------------------------------------------------------------------------
// Thread programs.

// A single exchange call; the result stands whether or not it succeeded.
class ExchangeOnceProgram final : public ThreadProgram {
 public:
  ExchangeOnceProgram(int view, Value v, int yields)
      : machine_(view, v, yields) {}

  std::unique_ptr<ThreadProgram> clone() const override {
    return std::make_unique<ExchangeOnceProgram>(*this);
  }
  bool done() const override { return machine_.call_done; }
  StepRecord step(World& w, ExecutionSink& sink) override {
    return machine_.step(w, sink);
  }
  void check_in_flight(const World& w, ExecutionSink& sink) const override {
    machine_.check_in_flight(w, sink);
  }

  std::optional<Value> result() const { return machine_.result; }

 private:
  ExchangeCallMachine machine_;
};

// exchange'(v): retry until a value arrives. Exhausting the attempt budget
// leaves the program stuck, which prunes the execution.
class ExchangeRetryProgram final : public ThreadProgram {
 public:
  ExchangeRetryProgram(int view, Value v, int yields, int attempts)
      : view_(view),
        given_(v),
        yields_(yields),
        attempts_left_(attempts),
        machine_(view, v, yields) {}

  std::unique_ptr<ThreadProgram> clone() const override {
    return std::make_unique<ExchangeRetryProgram>(*this);
  }
  bool done() const override { return done_; }
  bool stuck() const override { return stuck_; }
  StepRecord step(World& w, ExecutionSink& sink) override;
  void check_in_flight(const World& w, ExecutionSink& sink) const override {
    machine_.check_in_flight(w, sink);
  }

  Value result() const { return result_; }

 private:
  int view_;
  Value given_;
  int yields_;
  int attempts_left_;
  ExchangeCallMachine machine_;
  bool done_ = false;
  bool stuck_ = false;
  Value result_ = 0;
};

// ex_seq(vs): exchange a list in order, collecting the received values.
class ExSeqProgram final : public ThreadProgram {
 public:
  ExSeqProgram(int view, std::vector<Value> vs, int yields, int attempts);

  std::unique_ptr<ThreadProgram> clone() const override {
    return std::make_unique<ExSeqProgram>(*this);
  }
  bool done() const override { return index_ >= values_.size(); }
  bool stuck() const override { return stuck_; }
  StepRecord step(World& w, ExecutionSink& sink) override;
  void check_in_flight(const World& w, ExecutionSink& sink) const override {
    if (!done()) machine_.check_in_flight(w, sink);
  }

  const std::vector<Value>& received() const { return received_; }

 private:
  int view_;
  std::vector<Value> values_;
  int yields_;
  int attempts_per_call_;
  std::size_t index_ = 0;
  int attempts_left_ = 0;
  ExchangeCallMachine machine_;
  std::vector<Value> received_;
  bool stuck_ = false;
};

// One flip2 call.
class Flip2Program final : public ThreadProgram {
 public:
  explicit Flip2Program(int view) : machine_(view) {}

  std::unique_ptr<ThreadProgram> clone() const override {
    return std::make_unique<Flip2Program>(*this);
  }
  bool done() const override { return machine_.call_done; }
  StepRecord step(World& w, ExecutionSink& sink) override {
    return machine_.step(w, sink);
  }

  int result() const { return machine_.result; }

 private:
  Flip2CallMachine machine_;
};

// r := flip2(x); s := exchange(r), retry-free.
class Flip2ThenExchangeProgram final : public ThreadProgram {
 public:
  Flip2ThenExchangeProgram(int view, int yields)
      : view_(view), yields_(yields), flip_(view) {}

  std::unique_ptr<ThreadProgram> clone() const override {
    return std::make_unique<Flip2ThenExchangeProgram>(*this);
  }
  bool done() const override { return exchange_ && exchange_->call_done; }
  StepRecord step(World& w, ExecutionSink& sink) override;
  void check_in_flight(const World& w, ExecutionSink& sink) const override {
    if (exchange_) exchange_->check_in_flight(w, sink);
  }

  int flip_result() const { return flip_.result; }
  std::optional<Value> exchange_result() const {
    return exchange_ ? exchange_->result : std::nullopt;
  }

 private:
  int view_;
  int yields_;
  Flip2CallMachine flip_;
  std::optional<ExchangeCallMachine> exchange_;
};

// A fixed number of getAndInc calls, in order.
class IncSeqProgram final : public ThreadProgram {
 public:
  IncSeqProgram(int view, int calls) : view_(view), calls_(calls) {
    machine_ = IncCallMachine(view);
  }

  std::unique_ptr<ThreadProgram> clone() const override {
    return std::make_unique<IncSeqProgram>(*this);
  }
  bool done() const override {
    return static_cast<int>(results_.size()) >= calls_;
  }
  StepRecord step(World& w, ExecutionSink& sink) override;
  void check_in_flight(const World& w, ExecutionSink& sink) const override {
    if (!done()) machine_.check_in_flight(w, sink);
  }

  const std::vector<std::int64_t>& results() const { return results_; }

 private:
  int view_;
  int calls_;
  IncCallMachine machine_;
  std::vector<std::int64_t> results_;
};

}  // namespace nlcheck
