/** Wire types mirroring the service's canonical JSON bodies. */

export type Phase = "Phase0" | "Phase1" | "Phase2" | "Output";

export interface Stakeholder {
  name: string;
  role: string;
  contact?: string;
}

export interface ProfileEnvelope {
  profile: {
    system_name: string;
    purpose: string;
    operational_context: string;
    lifecycle_stage: string | null;
    domain_flags: string[];
    system_types: string[];
    stakeholders: Stakeholder[];
    stewardship: unknown;
  };
  revision: number;
  phase: Phase;
  missing_fields: string[];
  review_overdue: boolean;
  stale_phase1: boolean;
  stale_phase2: boolean;
}

export interface QuestionItem {
  id: string;
  criterion_id: string;
  text: string;
  stakeholder_role: string;
  answered: boolean;
}

export interface ScenarioItem {
  id: string;
  template_id: string;
  criterion_id: string;
  narrative: string;
  assigned_to: Stakeholder;
  evaluated: boolean;
}

export interface DimensionScores {
  individuals: number;
  society: number;
  mitigation_effort: number;
  duration: number;
}

export interface ControlInput {
  effectiveness: "Effective" | "PartiallyEffective" | "Ineffective" | "Absent";
  evidence_refs?: string[];
  control_owner?: Stakeholder;
}

export interface AnswerInput {
  value: "Adequate" | "Partial" | "Inadequate" | "NotApplicable";
  note: string;
  respondent: Stakeholder;
  evidence_refs?: string[];
}

export interface ActionInput {
  scenario_id: string;
  action_type:
    | "PolicyRevision"
    | "ControlImplementation"
    | "Training"
    | "Documentation"
    | "Monitoring"
    | "DesignChange";
  description: string;
  owner: Stakeholder;
  status?: "Proposed" | "InProgress" | "Done";
  due?: string;
}

export interface RemediationActionRow {
  id: string;
  scenario_id: string;
  action_type: string;
  description: string;
  owner: Stakeholder;
  status: string;
  due: string | null;
}

export interface Report {
  metadata: {
    assessment_id: string;
    system_name: string;
    issued_at: string;
    catalog_schema_version: string;
    thresholds: Record<string, unknown>;
  };
  phase1_table: Array<{
    criterion_id: string;
    criterion_name: string;
    domain_id: string;
    domain_name: string;
    score: number;
    band: string;
    advancing: boolean;
    unassessed: boolean;
    contributing_question_ids: string[];
  }>;
  phase2_table: Array<{
    scenario_id: string;
    criterion_id: string;
    dimensions: DimensionScores;
    control_effectiveness: string;
    classification: string;
    significant: boolean;
    override: unknown;
  }>;
  chart_data: {
    scenario_classifications_by_domain: Record<string, Record<string, number>>;
    criterion_band_counts: Record<string, number>;
  };
  remediation_section: {
    actions: RemediationActionRow[];
    coverage: Record<string, string[]>;
    required_scenarios: string[];
    recommended_scenarios: string[];
    uncovered_required: string[];
  };
  exclusions: Array<{ item: string; kind: string; stage: string; reason: string }>;
  status: "Draft" | "Final";
}

export interface ErrorPayload {
  error: string;
  detail?: string;
  missing?: string[];
  expected?: number;
  actual?: number;
  path?: string;
  question_id?: string;
  scenario_id?: string;
}
