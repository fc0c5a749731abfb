#pragma once

#include <string>
#include <vector>

#include "orderest/ordinal.hpp"

namespace orderest::demo {

// Sulfur mustard skin injury study: three genotypes of ten mice each, six
// ordinal responses on a five-level injury scale.
const std::vector<std::string>& genotypes();   // COX-1-d, WT, COX-2-d
const std::vector<std::string>& variables();
const std::vector<std::string>& levels();

// Published cumulative relative frequencies, [variable][genotype][level].
const std::vector<std::vector<std::vector<double>>>& cumulative_table();

// Counts recovered from the cumulative table (x10, differenced).
OrdinalCounts counts(std::size_t variable);

// Subject records. Within a genotype, subject k takes the k-th smallest
// category of every variable; the published table does not give the pairing.
MultiResponseDataset dataset();

// Published Bonferroni-corrected p-values, same order as variables().
const std::vector<double>& published_p_values();

}  // namespace orderest::demo
