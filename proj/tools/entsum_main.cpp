#include "entsum/harness.hpp"

int main(int argc, char** argv) { return entsum::run_cli(argc, argv); }
