import { z } from "zod";

/** Mirror of the service's demonstration file schema. */
export const DemonstrationSchema = z.object({
  schema_version: z.literal(1),
  user_id: z.string().min(1),
  actions: z
    .array(
      z.object({
        id: z.string().min(1),
        kind: z.enum(["primary", "secondary", "noop"]),
      }),
    )
    .min(1)
    .refine((actions) => actions[actions.length - 1]!.kind === "primary", {
      message: "a demonstration must end with a primary action",
    }),
});

export const PredictionSchema = z.object({
  prediction: z.array(z.string()),
  posterior_high: z.record(z.string(), z.number()),
  step: z.number().int().nonnegative(),
  plan_exhausted: z.boolean(),
});

export const SessionCreatedSchema = PredictionSchema.extend({
  session_id: z.string().min(1),
  initial_prediction: z.array(z.string()),
});

export const FeedbackReplySchema = z.object({ status: z.literal("ok") });

export const TranscriptSchema = z.object({
  session_id: z.string(),
  model_id: z.string(),
  step: z.number().int().nonnegative(),
  plan_exhausted: z.boolean(),
  posterior_high: z.record(z.string(), z.number()),
  transcript: z.array(
    z.object({
      step: z.number().int().positive(),
      predicted: z.array(z.string()),
      accepted: z.boolean().nullable(),
      actual: z.array(z.string()).nullable(),
      posterior_high: z.record(z.string(), z.number()),
    }),
  ),
});

export type Demonstration = z.infer<typeof DemonstrationSchema>;
export type PredictionReply = z.infer<typeof PredictionSchema>;
export type SessionCreated = z.infer<typeof SessionCreatedSchema>;
export type SessionTranscript = z.infer<typeof TranscriptSchema>;
