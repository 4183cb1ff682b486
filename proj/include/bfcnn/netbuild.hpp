#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "bfcnn/crn.hpp"
#include "bfcnn/types.hpp"

namespace bfcnn {

enum class ModuleKind { Crn, Judgment };

struct PhasedModule {
  std::string label;
  int phase_index = 0;
  ModuleKind kind = ModuleKind::Crn;
  Crn crn;
  std::vector<std::string> reads;   // species in some reactant complex
  std::vector<std::string> writes;  // species with a nonzero net change
  double threshold = 0.0;           // judgment comparator only
};

struct BuildOptions {
  double k = 2.0;      // assignment shift rate
  double k_pre = 4.0;  // pre-calculation boundary reactions
  double eta = 0.5;
  double threshold = 0.1;
};

struct BfcnnBlueprint {
  NetworkShape shape;
  DatasetSpec dataset;
  BuildOptions options;
  std::vector<PhasedModule> modules;  // schedule order
  std::vector<std::string> global_species;
  ConcentrationState initial_state;
  // Per module: local species id -> global id, and global ids of the write set.
  std::vector<std::vector<std::size_t>> local_to_global;
  std::vector<std::vector<std::size_t>> write_ids;

  std::size_t id(const std::string& name) const;
  const PhasedModule& module(const std::string& label) const;
  std::size_t module_position(const std::string& label) const;

 private:
  friend BfcnnBlueprint build_bfcnn(const NetworkShape&, const DatasetSpec&, const BuildOptions&,
                                    const DualRailMatrices&);
  std::unordered_map<std::string, std::size_t> index_;
};

void validate_shape(const NetworkShape& shape);

// Fills reads/writes from the CRN.
PhasedModule make_module(std::string label, int phase, Crn crn);

std::vector<PhasedModule> build_assignment(const NetworkShape& shape, double k);
std::vector<PhasedModule> build_feedforward_layer(int layer, const NetworkShape& shape);
// gamma snapshot copy: G relaxes to W (run inside the first lws phase).
Crn build_snapshot_copy();
PhasedModule build_precalc(const NetworkShape& shape, double k_pre);
PhasedModule build_judgment_standin(double threshold);
std::vector<PhasedModule> build_learning(const NetworkShape& shape, double eta);
PhasedModule build_clearout(const NetworkShape& shape);

BfcnnBlueprint build_bfcnn(const NetworkShape& shape, const DatasetSpec& dataset,
                           const BuildOptions& opts, const DualRailMatrices& initial);

// The whole schedule in the CRN text format with "# phase N: label" headers.
std::string emit_blueprint(const BfcnnBlueprint& bp);

// Name of the product-tree intermediate for monomial key at (level, position);
// the last level is the monomial species Q_<key>.
std::string tree_species(const std::string& key, int level, int pos, bool last);

}  // namespace bfcnn
