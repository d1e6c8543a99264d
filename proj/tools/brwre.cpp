#include "brwre/cli.hpp"

int main(int argc, char** argv) { return brwre::cli::main(argc, argv); }
