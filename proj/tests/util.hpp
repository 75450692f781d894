#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "bpa/system.hpp"

inline std::string fixture_text(const std::string& name) {
    std::ifstream in(std::string(BPA_FIXTURE_DIR) + "/" + name,
                     std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline bpa::System fixture(const std::string& name) {
    return bpa::System::parse(fixture_text(name));
}
