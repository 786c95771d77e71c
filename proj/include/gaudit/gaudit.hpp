#pragma once

#include "gaudit/corpus/dataset.hpp"
#include "gaudit/corpus/document.hpp"
#include "gaudit/corpus/frequency.hpp"
#include "gaudit/corpus/mining.hpp"
#include "gaudit/corpus/persons.hpp"
#include "gaudit/corpus/sentences.hpp"
#include "gaudit/corpus/tokenize.hpp"
#include "gaudit/embedding/cosine.hpp"
#include "gaudit/embedding/neighbors.hpp"
#include "gaudit/embedding/similarity.hpp"
#include "gaudit/embedding/table.hpp"
#include "gaudit/embedding/weat.hpp"
#include "gaudit/error.hpp"
#include "gaudit/lexicons.hpp"
#include "gaudit/probe/backend.hpp"
#include "gaudit/probe/classifier.hpp"
#include "gaudit/probe/scoring.hpp"
#include "gaudit/probe/templates.hpp"
#include "gaudit/report/plan.hpp"
#include "gaudit/report/report.hpp"
#include "gaudit/service/client.hpp"
#include "gaudit/service/protocol.hpp"
#include "gaudit/subspace/pca.hpp"
#include "gaudit/wordset.hpp"
