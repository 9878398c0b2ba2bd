// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cacaobpmn/bpmn/model.hpp"

namespace cacaobpmn::layout {

struct LayoutConfig {
  double task_width = 100;
  double task_height = 80;
  double gateway_size = 50;
  double annotation_width = 160;
  double annotation_line_height = 18;
  double annotation_text_pad = 20;
  double margin = 60;             // plane origin offset
  double min_column_pitch = 180;  // left edge to left edge
  double column_gap = 80;
  double min_row_pitch = 120;  // cell top to cell top
  double row_gap = 40;
  double stack_gap = 10;        // annotation stacking
  double sub_process_pad = 20;  // interior inset
  double group_pad = 30;        // per nesting level
};

/// Fills in the diagram: nodes flow left to right by depth, parallel work
/// stacks top to bottom, sub-process interiors nest, annotations sit above
/// the element they describe, and groups wrap the whole process. Geometry
/// the document already has is kept untouched; only elements without a
/// shape or edge get one. Coordinates never go negative, and synthesized
/// shapes never overlap each other (nesting aside).
void attach_diagram(bpmn::Definitions& definitions,
                    const LayoutConfig& config = {});

}  // namespace cacaobpmn::layout
