#include "orgutil/cli.hpp"

int main(int argc, char** argv) { return orgutil::cli::run(argc, argv); }
