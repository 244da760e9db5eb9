#pragma once

#include <memory>
#include <string>

#include "bdmsim/bdm.hpp"
#include "bdmsim/mac.hpp"

namespace bdmsim {

// Granularity of ladder updates. PerAttempt feeds every on-air outcome into
// the ladder (each retry transmits at the freshly adapted rate); PerChain
// updates once per frame, on final delivery or final drop.
enum class UpdateGranularity : uint8_t { PerAttempt, PerChain };

// Per-station transmission rate policy. The MAC asks for the rate before
// every attempt and reports each attempt outcome plus the chain completion.
class RateController {
public:
    virtual ~RateController() = default;

    virtual DataRate attempt_rate() const = 0;
    virtual void on_attempt(TxOutcome) {}
    virtual void on_chain_complete(TxOutcome) {}

    // Non-null for controllers that maintain a free-bandwidth target and
    // participate in the transmission gate.
    virtual const BdmState* bdm_state() const { return nullptr; }

    virtual std::string label() const = 0;
};

class FixedRateController final : public RateController {
public:
    explicit FixedRateController(DataRate rate) : rate_(rate) {}
    DataRate attempt_rate() const override { return rate_; }
    std::string label() const override { return "fixed:" + rate_.label(); }

private:
    DataRate rate_;
};

class BdmController final : public RateController {
public:
    BdmController(BdmState initial, UpdateGranularity granularity)
        : state_(initial), granularity_(granularity) {}

    DataRate attempt_rate() const override { return DataRate(state_.rate_level); }

    void on_attempt(TxOutcome outcome) override {
        if (granularity_ == UpdateGranularity::PerAttempt) state_ = bdm_update(state_, outcome);
    }
    void on_chain_complete(TxOutcome outcome) override {
        if (granularity_ == UpdateGranularity::PerChain) state_ = bdm_update(state_, outcome);
    }

    const BdmState* bdm_state() const override { return &state_; }
    std::string label() const override { return "bdm"; }

private:
    BdmState state_;
    UpdateGranularity granularity_;
};

// BDM's rate ladder with the free-bandwidth ladder and gate removed; the
// ablation baseline that isolates the bandwidth-reserve coupling.
class ArfLadderController final : public RateController {
public:
    ArfLadderController(int initial_level, UpdateGranularity granularity)
        : level_(initial_level), granularity_(granularity) {}

    DataRate attempt_rate() const override { return DataRate(level_); }

    void on_attempt(TxOutcome outcome) override {
        if (granularity_ == UpdateGranularity::PerAttempt) step(outcome);
    }
    void on_chain_complete(TxOutcome outcome) override {
        if (granularity_ == UpdateGranularity::PerChain) step(outcome);
    }

    std::string label() const override { return "arf"; }

private:
    void step(TxOutcome outcome) {
        if (outcome == TxOutcome::Success)
            level_ = std::min(level_ + 1, DataRate::kLevels - 1);
        else
            level_ = std::max(level_ - 1, 0);
    }

    int level_;
    UpdateGranularity granularity_;
};

}  // namespace bdmsim
