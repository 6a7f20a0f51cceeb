#include "tubeforge/cli.hpp"

int main(int argc, char** argv) { return tubeforge::cli::run(argc, argv); }
