#pragma once

#include "gfp/preprocessor.hpp"

namespace gfp {

struct Preprocessor::State {
    explicit State(const EngineConfig& config)
        : graph(config.window, config.input_schema.attributes.size()),
          stats(config.stat_config.stats_enabled.empty() ? 0 : config.stat_config.attributes.size()),
          maintainer(graph, stats,
                     config.stat_config.stats_enabled.empty() ? std::vector<int>{}
                                                              : StatsMaintainer::projection_for(config)),
          encoder(config),
          engine(MiningConfig::from(config), config.worker_count) {
        graph.set_observer(&maintainer);
    }

    GraphStore graph;
    VertexStats stats;
    StatsMaintainer maintainer;
    FeatureEncoder encoder;
    PatternEngine engine;
};

}  // namespace gfp
