#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace memhtm {

// Learning and inhibition parameters shared by the pooler, the sequence
// memory, and the template stage. Anything outside the documented range is
// rejected up front; nothing downstream re-checks.
struct HtmConfig {
  // Permanence value at or above which a potential synapse counts as
  // connected. Strictly inside (0, 1) so a zero permanence is never
  // connected and a saturated one always is.
  double connected_threshold = 0.5;

  // Minimum boosted overlap a column needs before it may win inhibition.
  double stimulus_threshold = 0.0;

  // Fraction of columns that survive inhibition within a neighborhood.
  double target_density = 0.02;

  // Permanence increment for synapses on active inputs of winning columns.
  double permanence_inc = 0.1;

  // Permanence decrement for synapses on inactive inputs of winning columns.
  double permanence_dec = 0.05;

  // Window length of the exponential moving average of column activity.
  int activity_window = 1000;

  // Strength of the activity-balancing boost; zero disables boosting.
  double boost_strength = 0.0;

  // Connected-synapse count a dendrite segment must exceed (strictly) to
  // put its cell into the predictive state.
  int segment_threshold = 1;

  // Fraction of columns expected to carry the winner set handed to the
  // sequence memory. Matches target_density when the pooler drives it.
  double tm_winner_fraction = 0.02;

  // Slow decay applied to segments that predicted but whose cell stayed
  // inactive. Must be well below permanence_dec.
  double segment_decay = 0.005;

  // Binarization threshold for trained class template accumulators.
  double template_threshold = 0.5;

  void validate() const {
    require(connected_threshold > 0.0 && connected_threshold < 1.0,
            "connected threshold must be in (0, 1)");
    require(stimulus_threshold >= 0.0 && std::isfinite(stimulus_threshold),
            "stimulus threshold must be >= 0");
    require(target_density > 0.0 && target_density < 1.0,
            "target density must be in (0, 1)");
    require(permanence_inc > 0.0 && permanence_inc < 1.0,
            "permanence increment must be in (0, 1)");
    require(permanence_dec > 0.0 && permanence_dec < 1.0,
            "permanence decrement must be in (0, 1)");
    require(activity_window >= 1, "activity window must be >= 1");
    require(boost_strength >= 0.0 && std::isfinite(boost_strength),
            "boost strength must be >= 0");
    require(segment_threshold >= 0, "segment threshold must be >= 0");
    require(tm_winner_fraction > 0.0 && tm_winner_fraction < 1.0,
            "winner fraction must be in (0, 1)");
    require(segment_decay > 0.0 && segment_decay < permanence_dec,
            "segment decay must be in (0, permanence decrement)");
    require(template_threshold >= 0.0 && template_threshold <= 1.0,
            "template threshold must be in [0, 1]");
  }

 private:
  static void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("HtmConfig: ") + what);
  }
};

}  // namespace memhtm
