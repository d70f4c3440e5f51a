// Regenerates the demo fixture files under data/.
#include <iostream>

#include "attribkit/toydata.hpp"

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";
    attribkit::toydata::write_fixtures(dir);
    std::cout << "wrote fixtures to " << dir << "\n";
    return 0;
}
