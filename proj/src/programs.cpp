#include "nlcheck/programs.hpp"

namespace nlcheck {

// ---------------------------------------------------------------------------
// ExchangeCallMachine

void ExchangeCallMachine::finish(std::optional<Value> r, const World& w,
                                 ExecutionSink& sink) {
  record.result = r;
  record.completed = true;
  result = r;
  call_done = true;
  sink.report(ex_check_post(record, *w.exchanger));
}

StepRecord ExchangeCallMachine::step(World& w, ExecutionSink& sink) {
  ExchangerState& ex = *w.exchanger;
  switch (pc) {
    case 0: {  // p <- alloc (v, U)
      record = ExchangeCallRecord{};
      record.view = view;
      record.given = given;
      record.env_at_start = ex.env_history(view);
      record.heap_at_start = ex.view(view).self_heap;
      record.perms_at_start = ex.view(view).self_perms;
      record.hist_at_start = ex.view(view).self_hist;
      offer = ex.step_alloc(view, given);
      pc = 1;
      return {"ex.alloc", "p" + std::to_string(offer)};
    }
    case 1: {  // CAS (g, null, p)
      bool installed = ex.step_install(view, offer);
      if (installed) {
        yields_left = yields_total;
        pc = yields_left > 0 ? 2 : 3;
      } else {
        pc = 4;
      }
      return {"ex.install-cas", installed ? "ok" : "fail"};
    }
    case 2: {  // the timeout wait, as scheduler-visible no-ops
      --yields_left;
      if (yields_left <= 0) pc = 3;
      return {"ex.yield", ""};
    }
    case 3: {  // CAS (p+1, U, R)
      seen = ex.step_timeout_cas(view, offer);
      finish(seen.is_matched() ? std::optional<Value>(seen.matched_with)
                               : std::nullopt,
             w, sink);
      pc = 9;
      return {"ex.timeout-cas", seen.str()};
    }
    case 4: {  // dealloc p
      ex.step_dealloc(view, offer);
      pc = 5;
      return {"ex.dealloc", "p" + std::to_string(offer)};
    }
    case 5: {  // cur <- read g
      cur = ex.step_read_g(view);
      if (cur == kNullOffer) {
        finish(std::nullopt, w, sink);
        pc = 9;
        return {"ex.read-g", "null"};
      }
      pc = 6;
      return {"ex.read-g", "p" + std::to_string(cur)};
    }
    case 6: {  // CAS (cur+1, U, M v)
      seen = ex.step_match(view, cur, given);
      pc = 7;
      return {"ex.match-cas", seen.str()};
    }
    case 7: {  // CAS (g, cur, null)
      bool unlinked = ex.step_unlink(view, cur);
      if (seen.is_unmatched()) {
        pc = 8;
      } else {
        finish(std::nullopt, w, sink);
        pc = 9;
      }
      return {"ex.unlink-cas", unlinked ? "ok" : "no"};
    }
    case 8: {  // w <- read cur
      Value got = ex.step_read_val(view, cur);
      finish(got, w, sink);
      pc = 9;
      return {"ex.read-val", std::to_string(got)};
    }
    default:
      throw precondition_error("exchange machine stepped after completion");
  }
}

void ExchangeCallMachine::check_in_flight(const World& w,
                                          ExecutionSink& sink) const {
  if (in_call()) sink.report(ex_check_in_flight(record, *w.exchanger));
}

// ---------------------------------------------------------------------------
// Flip2CallMachine

StepRecord Flip2CallMachine::step(World& w, ExecutionSink& sink) {
  FlipState& fl = *w.flip;
  switch (pc) {
    case 0: {
      record = Flip2CallRecord{};
      record.view = view;
      record.hist_at_start = fl.view(view).self_hist;
      record.first = fl.step_flip_x(view);
      pc = 1;
      return {"fl.flip", std::to_string(record.first.previous)};
    }
    case 1: {
      record.second = fl.step_flip_x(view);
      result = record.first.previous + record.second.previous;
      record.result = result;
      record.completed = true;
      call_done = true;
      sink.report(fl_check_post(record, fl));
      return {"fl.flip", std::to_string(record.second.previous)};
    }
    default:
      throw precondition_error("flip2 machine stepped after completion");
  }
}

// ---------------------------------------------------------------------------
// IncCallMachine

StepRecord IncCallMachine::step(World& w, ExecutionSink& sink) {
  NetworkState& cn = *w.network;
  switch (pc) {
    case 0: {  // b <- flip (bal)
      record = IncCallRecord{};
      record.view = view;
      record.self_hist_at_start = cn.view(view).self_hist;
      record.env_hist_at_start = cn.env_history(view);
      record.env_tokens_at_start = {cn.env_tokens(view, 0),
                                    cn.env_tokens(view, 1)};
      record.self_tokens_at_start = cn.view(view).tokens;
      sink.report(cn_check_snapshot_coherence(record));
      NetworkState::FlipResult r = cn.step_flip(view);
      token = r.token;
      pc = 1;
      return {"cn.flip", std::to_string(r.previous)};
    }
    case 1: {  // res <- fetchAndAdd2 (c_b)
      result = cn.step_faa2(view, token);
      record.result = result;
      record.completed = true;
      call_done = true;
      sink.report(cn_check_post(record, cn));
      return {"cn.faa2", std::to_string(result)};
    }
    default:
      throw precondition_error("getAndInc machine stepped after completion");
  }
}

void IncCallMachine::check_in_flight(const World& w,
                                     ExecutionSink& sink) const {
  if (in_call()) sink.report(cn_check_in_flight(record, *w.network));
}

// ---------------------------------------------------------------------------
// ExchangeRetryProgram

StepRecord ExchangeRetryProgram::step(World& w, ExecutionSink& sink) {
  StepRecord r = machine_.step(w, sink);
  if (machine_.call_done) {
    if (machine_.result) {
      result_ = *machine_.result;
      done_ = true;
    } else if (--attempts_left_ > 0) {
      machine_ = ExchangeCallMachine(view_, given_, yields_);
    } else {
      stuck_ = true;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// ExSeqProgram

ExSeqProgram::ExSeqProgram(int view, std::vector<Value> vs, int yields,
                           int attempts)
    : view_(view),
      values_(std::move(vs)),
      yields_(yields),
      attempts_per_call_(attempts) {
  attempts_left_ = attempts_per_call_;
  if (!values_.empty())
    machine_ = ExchangeCallMachine(view_, values_[0], yields_);
}

StepRecord ExSeqProgram::step(World& w, ExecutionSink& sink) {
  StepRecord r = machine_.step(w, sink);
  if (machine_.call_done) {
    if (machine_.result) {
      received_.push_back(*machine_.result);
      ++index_;
      if (index_ < values_.size()) {
        attempts_left_ = attempts_per_call_;
        machine_ = ExchangeCallMachine(view_, values_[index_], yields_);
      }
    } else if (--attempts_left_ > 0) {
      machine_ = ExchangeCallMachine(view_, values_[index_], yields_);
    } else {
      stuck_ = true;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Flip2ThenExchangeProgram

StepRecord Flip2ThenExchangeProgram::step(World& w, ExecutionSink& sink) {
  if (!flip_.call_done) {
    StepRecord r = flip_.step(w, sink);
    if (flip_.call_done)
      exchange_.emplace(view_, static_cast<Value>(flip_.result), yields_);
    return r;
  }
  return exchange_->step(w, sink);
}

// ---------------------------------------------------------------------------
// IncSeqProgram

StepRecord IncSeqProgram::step(World& w, ExecutionSink& sink) {
  StepRecord r = machine_.step(w, sink);
  if (machine_.call_done) {
    results_.push_back(machine_.result);
    if (static_cast<int>(results_.size()) < calls_)
      machine_ = IncCallMachine(view_);
  }
  return r;
}

}  // namespace nlcheck
