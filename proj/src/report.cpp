#include <ostream>

#include "tmot/cli.hpp"

namespace tmot {

void Report::emit_text(std::ostream& os) const {
    os << "# " << version << "\n";
    os << "# config " << std::hex << config_hash << std::dec << "\n";
    os << "# precision " << precision_summary << "\n";
    for (auto& sec : sections) {
        os << "\n[" << sec.name << "]\n";
        for (auto& [k, v] : sec.kv) os << "  " << k << " = " << v << "\n";
    }
}

void Report::emit_machine(std::ostream& os) const {
    os << "meta.version = " << version << "\n";
    os << "meta.config = " << std::hex << config_hash << std::dec << "\n";
    os << "meta.precision = " << precision_summary << "\n";
    for (auto& sec : sections) {
        for (auto& [k, v] : sec.kv) os << sec.name << "." << k << " = " << v << "\n";
    }
}

}  // namespace tmot
