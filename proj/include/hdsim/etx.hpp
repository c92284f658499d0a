#ifndef HDSIM_ETX_HPP
#define HDSIM_ETX_HPP

#include <cstdint>

namespace hdsim {

/// Link-quality estimator that models the channel as a two-state Markov chain
/// and keeps maximum-likelihood transition counts between consecutive
/// transmission outcomes. The success-transition counters start at 1 so the
/// estimate is defined (and optimistic) before any observation.
class GilbertElliottEstimator {
public:
    void record_outcome(bool acked) {
        if (last_state_good_) {
            if (acked) ++count11_; else ++count10_;
        } else {
            if (acked) ++count01_; else ++count00_;
        }
        last_state_good_ = acked;
    }

    /// Expected transmissions until the next success, conditioned on the most
    /// recent outcome: 1 / P(success | current state).
    double current_etx() const {
        if (last_state_good_) {
            return static_cast<double>(count10_ + count11_) / static_cast<double>(count11_);
        }
        return static_cast<double>(count00_ + count01_) / static_cast<double>(count01_);
    }

    bool last_state_good() const { return last_state_good_; }
    std::int64_t count00() const { return count00_; }
    std::int64_t count01() const { return count01_; }
    std::int64_t count10() const { return count10_; }
    std::int64_t count11() const { return count11_; }

private:
    std::int64_t count00_ = 0;
    std::int64_t count01_ = 1;
    std::int64_t count10_ = 0;
    std::int64_t count11_ = 1;
    bool last_state_good_ = true;
};

/// Baseline estimator: exponential moving average of the attempts a packet
/// needed on this link.
class EwmaEstimator {
public:
    explicit EwmaEstimator(double smoothing = 0.1) : smoothing_(smoothing) {}

    void record_attempts(int attempts_used) {
        etx_ = (1.0 - smoothing_) * etx_ + smoothing_ * static_cast<double>(attempts_used);
    }

    double current_etx() const { return etx_; }

private:
    double smoothing_;
    double etx_ = 1.0;
};

}  // namespace hdsim

#endif
