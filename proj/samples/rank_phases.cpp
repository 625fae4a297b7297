// Ranks the seven laparoscopic cholecystectomy phases by combining their
// average duration with an ordering given by one surgeon.

#include <cstdio>
#include <vector>

#include "eif/eif.hpp"

int main() {
  const eif::ItemSet phases({"Troc", "Prep", "Clip", "Det", "Retr", "Hemo", "Clos"});

  // average phase durations in seconds
  const auto durations = eif::make_rating(phases, {179, 419, 390, 562, 390, 337, 172});
  const auto opinion = eif::make_ordering(phases, {6, 1, 2, 3, 5, 4, 7});

  const std::vector<eif::ReciprocalMatrix> ccms{eif::rating_to_ccm(durations),
                                                eif::ordering_to_ccm(opinion)};
  const auto impact = eif::impact_vector(eif::aggregate(ccms));

  for (const auto& [label, eif_value] : eif::rank_events(impact))
    std::printf("%-5s %.4f\n", label.c_str(), eif_value);
}
