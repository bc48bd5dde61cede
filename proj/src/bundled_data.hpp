// bundled_data.hpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The corpus-affinity Authors.
//
// Data files compiled into the library.

#ifndef CORPUS_AFFINITY_SRC_BUNDLED_DATA_HPP_
#define CORPUS_AFFINITY_SRC_BUNDLED_DATA_HPP_

#include <string_view>

namespace corpus_affinity::bundled {

// data/en_coarse_pos.tsv: "word<TAB>tag" most-frequent-tag lexicon.
std::string_view coarse_pos_lexicon();

// data/task_means.csv: downstream scores of the six BERT variants on the
// twelve target tasks (means over five seeds, percentage points).
std::string_view task_means_csv();

}  // namespace corpus_affinity::bundled

#endif  // CORPUS_AFFINITY_SRC_BUNDLED_DATA_HPP_
