#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pms2l/error.hpp"
#include "pms2l/serialize.hpp"

namespace {

int fail(int code, const std::string& kind, const std::string& message, const std::string& stage = {}) {
    pms2l::Json j;
    j["error"] = kind;
    j["exit"] = code;
    if (!stage.empty()) j["stage"] = stage;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return code;
}

std::string scalar_token(const pms2l::Json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Turns a JSON config object into flag tokens. Placed before the user's own flags, so with
// take-last semantics anything given on the command line wins.
std::vector<std::string> config_tokens(const std::string& path) {
    const auto j = pms2l::read_json_file(path);
    if (!j.is_object()) throw pms2l::ConfigError(path + ": config must be a JSON object");
    std::vector<std::string> out;
    for (const auto& [key, value] : j.items()) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (name == "config") continue;
        if (value.is_boolean()) {
            out.push_back(value.get<bool>() ? "--" + name : "--no-" + name);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ',';
                joined += scalar_token(item);
            }
            out.push_back("--" + name);
            out.push_back(joined);
        } else if (value.is_null()) {
            continue;
        } else {
            out.push_back("--" + name);
            out.push_back(scalar_token(value));
        }
    }
    return out;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
    }
    if (config.empty()) return args;
    const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.empty() || a[0] != '-'; });
    if (sub == args.end()) return args;
    const auto tokens = config_tokens(config);
    args.insert(sub + 1, tokens.begin(), tokens.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-step semi-supervised multiclass learning with clustering-based penalties",
                 "pms2l"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    pms2l::cli::register_commands(app);

    try {
        auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(args.begin(), args.end());
        app.parse(args);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(1, "usage", e.what());
    } catch (const pms2l::cli::MissingPrerequisite& e) {
        return fail(2, "missing_prerequisite", e.what(), e.stage());
    } catch (const pms2l::ParseError& e) {
        return fail(3, "parse", e.what());
    } catch (const pms2l::DataError& e) {
        return fail(3, "data", e.what());
    } catch (const pms2l::ConfigError& e) {
        return fail(1, "config", e.what());
    } catch (const pms2l::ArgumentError& e) {
        return fail(1, "argument", e.what());
    } catch (const std::exception& e) {
        return fail(1, "error", e.what());
    }
}
