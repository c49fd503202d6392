#pragma once

#include "mergeweave/text.hpp"
#include "mergeweave/tokenizer.hpp"
#include "mergeweave/diff.hpp"
#include "mergeweave/merge3.hpp"
#include "mergeweave/conflict.hpp"
#include "mergeweave/labels.hpp"
#include "mergeweave/align.hpp"
#include "mergeweave/process.hpp"
#include "mergeweave/classifier.hpp"
#include "mergeweave/syntax.hpp"
#include "mergeweave/resolver.hpp"
#include "mergeweave/dataset.hpp"
#include "mergeweave/stats.hpp"
#include "mergeweave/eval.hpp"
#include "mergeweave/git.hpp"
#include "mergeweave/miner.hpp"
#include "mergeweave/config.hpp"
#include "mergeweave/stub_scorer.hpp"
#include "mergeweave/factory.hpp"
