#pragma once

#include <stdexcept>
#include <string>

#include <CLI11.hpp>

namespace pms2l::cli {

/// An upstream artifact is missing; `stage` names the command that produces it.
class MissingPrerequisite : public std::runtime_error {
public:
    MissingPrerequisite(std::string stage, const std::string& what)
        : std::runtime_error(what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Adds every subcommand to `app`. Each one does its work from its parse callback.
void register_commands(CLI::App& app);

}  // namespace pms2l::cli
