#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tmot/sigma_bundle.hpp"

namespace tmot {

struct ParseError : std::runtime_error {
    int line = 0, col = 0;
    ParseError(std::string msg, int l, int c)
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) + ")"),
          line(l),
          col(c) {}
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ObjectKind { AndersonModuleBlock, AMotiveBlock, DualAMotiveBlock, HodgePinkBlock };

struct ProblemConfig {
    FieldCtx field;
    Work work;
    ObjectKind kind = ObjectKind::AndersonModuleBlock;

    // anderson-module
    int dim = 1;
    std::vector<std::vector<SkewPoly>> module_rows;  // d rows of d skew polynomials

    // a-motive / dual-a-motive
    std::vector<std::vector<TPoly>> motive_rows;
    int jshift = 0;

    // declared weight filtration (coordinate flag), optional
    std::vector<FlagStep> flag;
    bool flag_given = false;

    // hodge-pink block: U rows as Laurent polynomials in u
    std::vector<std::vector<LS>> u_rows;
    std::vector<Rat> hp_weights_decl;

    std::vector<std::string> tasks;  // with arguments, e.g. "torsion a=t^2+t"

    uint64_t source_hash = 0;
};

ProblemConfig parse_config(const std::string& text);

struct ReportSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> kv;
};

struct Report {
    std::string version;
    uint64_t config_hash = 0;
    std::string precision_summary;
    std::vector<ReportSection> sections;

    void emit_text(std::ostream& os) const;
    void emit_machine(std::ostream& os) const;
};

// run all tasks (or the selected one) of a parsed config
Report run_config(const ProblemConfig& cfg, const std::string& only_task = "");

// CLI entry: returns the process exit code (0 ok, 1 domain error, 2 parse error)
int cli_main(int argc, char** argv);

}  // namespace tmot
