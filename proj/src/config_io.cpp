#include "rnadesign/config_io.hpp"

#include <fstream>

namespace rnadesign {

using nlohmann::json;

json policy_config_to_json(const PolicyConfig& cfg) {
    json j;
    j["state_radius"] = cfg.state_radius;
    j["input_mode"] = cfg.input_mode == InputMode::embedding ? "embedding" : "binary";
    if (cfg.input_mode == InputMode::embedding) j["embedding_dim"] = cfg.embedding_dim;
    j["conv_layers"] = json::array();
    for (const auto& c : cfg.conv_layers)
        j["conv_layers"].push_back({{"filters", c.filters}, {"kernel", c.kernel}});
    j["recurrent_layers"] = cfg.recurrent_layers;
    j["dense_layers"] = cfg.dense_layers;
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"] = cfg.batch_size;
    j["entropy_coeff"] = cfg.entropy_coeff;
    j["reward_exponent"] = cfg.reward_exponent;
    return j;
}

PolicyConfig policy_config_from_json(const json& j) {
    PolicyConfig cfg;
    cfg.state_radius = j.value("state_radius", cfg.state_radius);
    const std::string mode = j.value("input_mode", std::string(
        cfg.input_mode == InputMode::embedding ? "embedding" : "binary"));
    if (mode == "embedding") cfg.input_mode = InputMode::embedding;
    else if (mode == "binary") cfg.input_mode = InputMode::binary;
    else throw InvalidConfig("unknown input_mode: " + mode);
    cfg.embedding_dim = j.value("embedding_dim", cfg.embedding_dim);
    if (j.contains("conv_layers")) {
        cfg.conv_layers.clear();
        for (const auto& c : j.at("conv_layers"))
            cfg.conv_layers.push_back({c.value("filters", 1), c.value("kernel", 3)});
    }
    if (j.contains("recurrent_layers"))
        cfg.recurrent_layers = j.at("recurrent_layers").get<std::vector<int>>();
    if (j.contains("dense_layers"))
        cfg.dense_layers = j.at("dense_layers").get<std::vector<int>>();
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.entropy_coeff = j.value("entropy_coeff", cfg.entropy_coeff);
    cfg.reward_exponent = j.value("reward_exponent", cfg.reward_exponent);
    cfg.validate();
    return cfg;
}

json train_loop_to_json(const TrainLoopConfig& cfg) {
    json j;
    j["strategy"] = to_string(cfg.strategy);
    j["restart_period_s"] = cfg.restart_period_s;
    j["ppo"] = {{"clip_epsilon", cfg.ppo.clip_epsilon},
                {"epochs_per_batch", cfg.ppo.epochs_per_batch},
                {"value_coeff", cfg.ppo.value_coeff}};
    j["worker_count"] = cfg.worker_count;
    j["time_budget_s"] = cfg.time_budget_s;
    j["max_episodes"] = cfg.max_episodes;
    j["lis_enabled"] = cfg.lis_enabled;
    j["lis_xi"] = cfg.lis_xi;
    j["stop_on_solve"] = cfg.stop_on_solve;
    j["seed"] = cfg.seed;
    return j;
}

TrainLoopConfig train_loop_from_json(const json& j) {
    TrainLoopConfig cfg;
    cfg.strategy = strategy_from_string(j.value("strategy", to_string(cfg.strategy)));
    cfg.restart_period_s = j.value("restart_period_s", cfg.restart_period_s);
    if (j.contains("ppo")) {
        const auto& p = j.at("ppo");
        cfg.ppo.clip_epsilon = p.value("clip_epsilon", cfg.ppo.clip_epsilon);
        cfg.ppo.epochs_per_batch = p.value("epochs_per_batch", cfg.ppo.epochs_per_batch);
        cfg.ppo.value_coeff = p.value("value_coeff", cfg.ppo.value_coeff);
    }
    cfg.worker_count = j.value("worker_count", cfg.worker_count);
    cfg.time_budget_s = j.value("time_budget_s", cfg.time_budget_s);
    cfg.max_episodes = j.value("max_episodes", cfg.max_episodes);
    cfg.lis_enabled = j.value("lis_enabled", cfg.lis_enabled);
    cfg.lis_xi = j.value("lis_xi", cfg.lis_xi);
    cfg.stop_on_solve = j.value("stop_on_solve", cfg.stop_on_solve);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.validate();
    return cfg;
}

json search_space_to_json(const SearchSpace& space) {
    json arr = json::array();
    for (const auto& d : space.params()) {
        json p;
        p["name"] = d.name;
        switch (d.type) {
            case ParamType::integer: p["type"] = "integer"; break;
            case ParamType::real: p["type"] = "real"; break;
            case ParamType::categorical: p["type"] = "categorical"; break;
        }
        if (d.type == ParamType::categorical) {
            p["choices"] = d.choices;
        } else {
            p["min"] = d.lo;
            p["max"] = d.hi;
            if (d.type == ParamType::real)
                p["prior"] = d.prior == Prior::log_uniform ? "log" : "linear";
        }
        if (!d.condition_parent.empty())
            p["condition"] = {{"parent", d.condition_parent}, {"values", d.condition_values}};
        arr.push_back(std::move(p));
    }
    return json{{"params", std::move(arr)}};
}

SearchSpace search_space_from_json(const json& j) {
    SearchSpace space;
    for (const auto& p : j.at("params")) {
        ParamDescriptor d;
        d.name = p.at("name").get<std::string>();
        const std::string type = p.at("type").get<std::string>();
        if (type == "integer") d.type = ParamType::integer;
        else if (type == "real") d.type = ParamType::real;
        else if (type == "categorical") d.type = ParamType::categorical;
        else throw InvalidConfig("unknown parameter type: " + type);
        if (d.type == ParamType::categorical) {
            d.choices = p.at("choices").get<std::vector<std::string>>();
        } else {
            d.lo = p.at("min").get<double>();
            d.hi = p.at("max").get<double>();
            const std::string prior = p.value("prior", "linear");
            if (prior == "log") d.prior = Prior::log_uniform;
            else if (prior == "linear") d.prior = Prior::linear;
            else throw InvalidConfig("unknown prior: " + prior);
        }
        if (p.contains("condition")) {
            d.condition_parent = p.at("condition").at("parent").get<std::string>();
            d.condition_values =
                p.at("condition").at("values").get<std::vector<std::string>>();
        }
        space.add(std::move(d));
    }
    return space;
}

json dataset_config_to_json(const DatasetConfig& cfg) {
    json j;
    j["count_train"] = cfg.count_train;
    j["count_val"] = cfg.count_val;
    j["count_test"] = cfg.count_test;
    j["min_length"] = cfg.min_length;
    j["max_length"] = cfg.max_length;
    j["filter_budget_s"] = cfg.filter_budget_s;
    j["seed"] = cfg.seed;
    j["max_attempts"] = cfg.max_attempts;
    return j;
}

DatasetConfig dataset_config_from_json(const json& j) {
    DatasetConfig cfg;
    cfg.count_train = j.value("count_train", cfg.count_train);
    cfg.count_val = j.value("count_val", cfg.count_val);
    cfg.count_test = j.value("count_test", cfg.count_test);
    cfg.min_length = j.value("min_length", cfg.min_length);
    cfg.max_length = j.value("max_length", cfg.max_length);
    cfg.filter_budget_s = j.value("filter_budget_s", cfg.filter_budget_s);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.max_attempts = j.value("max_attempts", cfg.max_attempts);
    cfg.validate();
    return cfg;
}

FileConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    json j;
    in >> j;
    FileConfig cfg;
    if (j.contains("policy")) cfg.policy = policy_config_from_json(j.at("policy"));
    if (j.contains("loop")) cfg.loop = train_loop_from_json(j.at("loop"));
    if (j.contains("search_space")) cfg.space = search_space_from_json(j.at("search_space"));
    if (j.contains("dataset")) cfg.dataset = dataset_config_from_json(j.at("dataset"));
    return cfg;
}

std::vector<DotBracket> load_targets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open targets file: " + path.string());
    std::vector<DotBracket> targets;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        targets.push_back(DotBracket::parse(line));
    }
    return targets;
}

void save_targets(const std::filesystem::path& path, std::span<const DotBracket> targets) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write targets file: " + path.string());
    for (const auto& t : targets) out << t.str() << "\n";
}

}  // namespace rnadesign
